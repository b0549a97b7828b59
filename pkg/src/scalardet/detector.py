"""Detector response kernels and sampling windows.

A detector outcome is characterized by a positive response kernel R(y) on
spacetime separations; everything downstream consumes its Fourier transform
R~(xi) = int d^{d+1}y exp(-i(xi0 y0 - xivec.yvec)) R(y).

The kernel families implemented here are time-pointlike: their Fourier
profile depends on the spatial momentum only, through the band energy
eps(k) = sqrt(k^2 + band_mass^2), so R(y) = A delta(y0) rho(yvec) with rho a
smooth spatial smearing. On the mass shell this gives the intended response
shapes (a Gaussian energy filter, or a flat maximally localized response)
while keeping the localization matrix a genuine correlation matrix: entries
bounded by 1 and positive semidefinite in the regime where the log-profile is
midpoint-concave along the band.

The operator-level transform `kernel_fourier` additionally clips the support
to the closed forward cone xi0 >= |xivec| (a detector cannot respond to
spacelike or past-directed transfer); the smooth profile stays available to
the limiting-regime expansions that evaluate it slightly off the cone.

Sampling windows are unnormalized Gaussians f(t, xvec) with f(0) = 1; the
associated 4-volume nu = int f^2 is pi^2 dt dx^3 in 3+1 and pi dt dx in 1+1.
They satisfy f(a) f(b) = f((a+b)/2)^2 sqrt(f(a-b)) exactly, which is what
lets windowed probabilities factor into mean and relative coordinates.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import ScaleSeparationWarning, ZeroDenominator
from .field.types import dispersion

__all__ = [
    "DetectorKernel",
    "GaussianEnergy",
    "MaximalLocalization",
    "TabulatedOnShell",
    "SamplingFunctions",
    "kernel_profile",
    "kernel_log_profile",
    "kernel_fourier",
    "localization_matrix",
    "is_positive_localization",
    "PositivityReport",
    "gaussian_identity_residual",
]


class DetectorKernel:
    """Marker base class for response-kernel families."""


@dataclass(frozen=True)
class GaussianEnergy(DetectorKernel):
    """Gaussian energy filter: on shell R~ = A exp(-(eps_p - e0)^2 tau^2).

    tau is the response time (filter bandwidth 1/tau), e0 the center energy,
    band_mass the mass entering the band dispersion (0 for a massless band).
    """

    amplitude: float
    e0: float
    tau: float
    band_mass: float = 0.0

    def __post_init__(self):
        if self.amplitude <= 0 or self.tau < 0 or self.band_mass < 0:
            raise ValueError("need amplitude > 0, tau >= 0, band_mass >= 0")


@dataclass(frozen=True)
class MaximalLocalization(DetectorKernel):
    """Flat response R~ = A: a pointlike detector with no energy filtering.

    Totals built from it are UV divergent and only meaningful at a fixed
    momentum cutoff; rate helpers tag their output accordingly.
    """

    amplitude: float

    def __post_init__(self):
        if self.amplitude <= 0:
            raise ValueError("amplitude must be positive")


@dataclass(eq=False)
class TabulatedOnShell(DetectorKernel):
    """Response tabulated on shell: strictly positive values at |momenta|.

    Off-table evaluations clamp to the edge values; between nodes the
    log-profile is interpolated linearly (exact for exponential-family
    profiles, so a log-linear table reproduces its generating family).
    """

    momenta: np.ndarray
    values: np.ndarray
    band_mass: float = 0.0

    def __post_init__(self):
        self.momenta = np.asarray(self.momenta, dtype=float)
        self.values = np.asarray(self.values, dtype=float)
        if self.momenta.ndim != 1 or self.momenta.size < 2:
            raise ValueError("need at least two table nodes")
        if np.any(np.diff(self.momenta) <= 0):
            raise ValueError("table momenta must be strictly increasing")
        if self.values.shape != self.momenta.shape:
            raise ValueError("values must match momenta")
        if np.any(self.values <= 0):
            raise ValueError("tabulated response must be strictly positive")
        if self.band_mass < 0:
            raise ValueError("band_mass must be non-negative")


def kernel_log_profile(kernel: DetectorKernel, k):
    """log R~_prof(|k|): the smooth profile's logarithm, exactly evaluated.

    Working with the log directly avoids catastrophic cancellation in
    convexity checks and keeps the localization matrix computable when the
    profile itself underflows.
    """
    k = np.abs(np.asarray(k, dtype=float))
    if isinstance(kernel, GaussianEnergy):
        eps = dispersion(k, kernel.band_mass)
        return np.log(kernel.amplitude) - (kernel.tau * (eps - kernel.e0)) ** 2
    if isinstance(kernel, MaximalLocalization):
        return np.broadcast_to(np.log(kernel.amplitude), k.shape).copy()
    if isinstance(kernel, TabulatedOnShell):
        return np.interp(k, kernel.momenta, np.log(kernel.values))
    raise TypeError("unknown kernel family: %r" % (kernel,))


def kernel_profile(kernel: DetectorKernel, k):
    """Smooth spatial-momentum profile R~_prof(|k|) (no cone clipping)."""
    return np.exp(kernel_log_profile(kernel, k))


def kernel_fourier(kernel: DetectorKernel, xi0, xivec):
    """Operator-level Fourier transform R~(xi), clipped to the forward cone.

    Parameters
    ----------
    xi0 : array_like
        Energy-transfer component.
    xivec : array_like
        Spatial components; the last axis is the spatial index, broadcasting
        against xi0 otherwise. A scalar or 1-d xivec with matching shape is
        treated as a single spatial dimension.

    Returns R~_prof(|xivec|) on the closed cone xi0 >= |xivec|, and 0 off it.
    """
    xi0 = np.asarray(xi0, dtype=float)
    xivec = np.asarray(xivec, dtype=float)
    if xivec.ndim > xi0.ndim:
        kmag = np.sqrt(np.sum(xivec**2, axis=-1))
    else:
        kmag = np.abs(xivec)
    out = kernel_profile(kernel, kmag)
    return np.where(xi0 >= kmag, out, 0.0)


def localization_matrix(
    kernel: DetectorKernel, momenta, mass: float | None = None, method: str = "log"
):
    """Normalized localization overlap matrix on the mass shell.

    S(p, p') = R~(mid) / sqrt(R~(p_on) R~(p'_on)) with mid the on-shell
    momentum average; diagonal exactly 1. Two documented evaluation paths:

    - "log": exp of log-profile differences (stable for any exponent range);
    - "ratio": direct profile ratio; raises ZeroDenominator when the profile
      underflows to zero at a node.

    mass defaults to the kernel band mass and only matters through the
    profile's dispersion (the spatial midpoint is mass-independent).
    """
    p = np.asarray(momenta, dtype=float)
    mid = 0.5 * np.abs(p[:, None] + p[None, :])
    if method == "log":
        ln = kernel_log_profile(kernel, p)
        lnmid = kernel_log_profile(kernel, mid)
        return np.exp(lnmid - 0.5 * (ln[:, None] + ln[None, :]))
    if method == "ratio":
        prof = kernel_profile(kernel, p)
        if np.any(prof == 0.0):
            raise ZeroDenominator(
                "profile underflowed at a node; use the log evaluation path"
            )
        return kernel_profile(kernel, mid) / np.sqrt(prof[:, None] * prof[None, :])
    raise ValueError("method must be 'log' or 'ratio'")


@dataclass(frozen=True)
class PositivityReport:
    passed: bool
    min_eigenvalue: float
    max_entry: float
    tol: float


def is_positive_localization(
    kernel: DetectorKernel, momenta, tol: float = 1e-10
) -> PositivityReport:
    """Check that the localization matrix is a genuine correlation matrix.

    Passes when every entry is <= 1 + tol (midpoint concavity of the
    log-profile) and the smallest eigenvalue of S is >= -tol.
    """
    s = localization_matrix(kernel, momenta, method="log")
    eigs = np.linalg.eigvalsh(0.5 * (s + s.T))
    min_eig = float(eigs[0])
    max_entry = float(np.max(s))
    passed = (min_eig >= -tol) and (max_entry <= 1.0 + tol)
    return PositivityReport(passed, min_eig, max_entry, tol)


@dataclass(frozen=True)
class SamplingFunctions:
    """Gaussian sampling windows of temporal width dt and spatial width dx."""

    delta_t: float
    delta_x: float

    def __post_init__(self):
        if self.delta_t <= 0 or self.delta_x <= 0:
            raise ValueError("sampling widths must be positive")

    def temporal(self, s):
        """f_t(s) = exp(-s^2 / (2 dt^2)), peak-normalized."""
        s = np.asarray(s, dtype=float)
        return np.exp(-(s**2) / (2.0 * self.delta_t**2))

    def spatial(self, r):
        r = np.asarray(r, dtype=float)
        return np.exp(-(r**2) / (2.0 * self.delta_x**2))

    def spacetime_volume(self, spatial_dim: int) -> float:
        """nu = int f^2 over d+1 dimensions: (sqrt(pi) dt) (sqrt(pi) dx)^d."""
        return float(
            (np.sqrt(np.pi) * self.delta_t)
            * (np.sqrt(np.pi) * self.delta_x) ** spatial_dim
        )

    def average_factor(self, domega, dk_mag):
        """Fourier-domain averaging factor for a momentum transfer (domega, dk).

        Convolving a density with the normalized window sigma = f^2/nu
        multiplies its Fourier components by exp(-dt^2 w^2/4 - dx^2 k^2/4).
        """
        domega = np.asarray(domega, dtype=float)
        dk_mag = np.asarray(dk_mag, dtype=float)
        return np.exp(
            -0.25 * (self.delta_t * domega) ** 2 - 0.25 * (self.delta_x * dk_mag) ** 2
        )

    def check_scale_separation(self, kernel: DetectorKernel, factor: float = 10.0):
        """Warn when the window is not slow compared to the kernel response time."""
        tau = getattr(kernel, "tau", 0.0)
        if tau > 0 and self.delta_t < factor * tau:
            warnings.warn(
                "sampling width delta_t=%g is below %g x kernel response time %g; "
                "windowed densities may not be in the slow-sampling regime"
                % (self.delta_t, factor, tau),
                ScaleSeparationWarning,
                stacklevel=2,
            )


def gaussian_identity_residual(sampling: SamplingFunctions, a, b) -> float:
    """Max residual of f(a) f(b) = f((a+b)/2)^2 sqrt(f(a-b)) on 1-d samples.

    Exact for Gaussians; evaluated on the temporal window (the spatial one is
    the same function with dx in place of dt).
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    lhs = sampling.temporal(a) * sampling.temporal(b)
    rhs = sampling.temporal(0.5 * (a + b)) ** 2 * np.sqrt(sampling.temporal(a - b))
    return float(np.max(np.abs(lhs - rhs)))
