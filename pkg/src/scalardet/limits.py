"""Limiting regimes: worldline detector response and photodetection terms.

Two reductions of the smeared-correlator detection density live here.

Worldline (pointlike) limit: when the detector world-tube shrinks to a
timelike curve x0(tau), the windowed, energy-resolved density becomes a
response function. With the two-point function pulled back to the worldline
and written through its spectral weight, W(s) = int dw/2pi e^{-iws} What(w)
with What >= 0, the response at energy transfer eps is the spectral weight
smeared by the window transform,

    resp(eps) = (1/2pi) int dw What(w) ghat(eps + w),
    ghat(u) = 2 dt sqrt(pi) exp(-u^2 dt^2),

manifestly nonnegative, reducing to What(-eps) for an infinite window. An
inertial detector in vacuum is never excited (resp = 0 for eps > 0) and
de-excites at rate eps/(2 pi) in 3+1 massless conventions; thermal weights
satisfy detailed balance What(-w) = e^{-w/T} What(w) exactly. The uniformly
accelerated vacuum response coincides with the comoving thermal response at
T = a/(2 pi) (a scalar-field fact in 3+1) and is computed through the same
spectral form; it is a formal result, since no first-principles Hamiltonian
generates translations along the accelerated frame, and outputs are labeled
accordingly downstream.

Photodetection expansion: for a massless field in 3+1 and a coherent pulse,
the detection density at x splits into a state-independent floor, a
co-rotating (frequency-difference) term, and a counter-rotating
(frequency-sum) term,

    P0    = int d3k/(2pi)^3 R~(k) / (2 w_k),
    P1(x) = int dmu(k) dmu(k') z(k) z*(k') e^{ i(k-k')x} R~((k+k')/2),
    P2(x) = 2 Re int dmu(k) dmu(k') z(k) z(k') e^{i(k+k')x} R~((k-k')/2),

with dmu(k) = d3k / ((2pi)^3 sqrt(2 w_k)). The kernel families are
time-pointlike, so R~ at the pair midpoints is their smooth spatial profile;
averaging the phases over a detector cell of widths (dt, dx) multiplies each
pair term by the window factor at its frequency/momentum transfer, which
leaves P1 essentially untouched but suppresses P2 like
exp(-dt^2 (w+w')^2 / 4). Dropping the counter-rotating term on those grounds
is the rotating-wave step; `rwa_density` returns exactly the kept P0 + P1
content, and `glauber_point_limit` takes the delta-kernel limit (profile
identically 1), leaving the cutoff-regulated vacuum floor plus |chi(x)|^2
with chi the pulse's positive-frequency amplitude at x.

Every pair reduction is chunked over momentum rows in a layout fixed by the
problem size, so results are independent of the worker-thread count.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from ._num import chunk_ranges, panel_nodes, run_chunked, trapezoid_weights
from .detection import RateResult, _take_real
from .detector import (
    DetectorKernel,
    GaussianEnergy,
    MaximalLocalization,
    SamplingFunctions,
    TabulatedOnShell,
    kernel_profile,
)
from .errors import (
    NonStationaryConfiguration,
    QuadratureDivergence,
    ScalardetError,
    ScaleSeparationWarning,
)
from .field.types import TWO_PI, SpacetimePoint, Vacuum
from .field.wightman import Thermal

__all__ = [
    "Inertial",
    "UniformAcceleration",
    "udw_response",
    "CoherentPulse",
    "PulseGrid",
    "pulse_grid",
    "GlauberTerms",
    "GlauberScan",
    "glauber_terms",
    "glauber_profile",
    "rwa_density",
    "glauber_point_limit",
]


# ---------------------------------------------------------------------------
# worldline response
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Inertial:
    """Inertial worldline through the origin, velocity along the x-axis."""

    velocity: float = 0.0

    def __post_init__(self):
        if not abs(self.velocity) < 1.0:
            raise ValueError("need |velocity| < 1")

    @property
    def gamma(self) -> float:
        return 1.0 / np.sqrt(1.0 - self.velocity**2)

    def position(self, tau):
        """(t, x) at proper time tau."""
        tau = np.asarray(tau, dtype=float)
        return self.gamma * tau, self.gamma * self.velocity * tau

    def four_velocity(self, tau):
        """Exact (dt/dtau, dx/dtau); normalized to +1 by construction."""
        tau = np.asarray(tau, dtype=float)
        one = np.ones_like(tau)
        return self.gamma * one, self.gamma * self.velocity * one


@dataclass(frozen=True)
class UniformAcceleration:
    """Uniformly accelerated worldline of proper acceleration a > 0."""

    a: float

    def __post_init__(self):
        if self.a <= 0:
            raise ValueError("acceleration must be positive")

    def position(self, tau):
        tau = np.asarray(tau, dtype=float)
        return np.sinh(self.a * tau) / self.a, np.cosh(self.a * tau) / self.a

    def four_velocity(self, tau):
        tau = np.asarray(tau, dtype=float)
        return np.cosh(self.a * tau), np.sinh(self.a * tau)


def _spectral_weight(state, omega, mass: float, spatial_dim: int):
    """Spectral weight What(w) of the worldline two-point function.

    Supported combinations: massless field in 3 spatial dimensions (vacuum
    and thermal) and massive field in 1 spatial dimension (vacuum only, used
    by the pointlike-consistency checks against the grid-based machinery).
    """
    omega = np.asarray(omega, dtype=float)
    if spatial_dim == 3 and mass == 0.0:
        vac = np.where(omega > 0.0, omega, 0.0) / TWO_PI
    elif spatial_dim == 1 and mass > 0.0:
        if isinstance(state, Thermal):
            raise ScalardetError(
                "thermal worldline response implemented for the massless "
                "3+1 field only"
            )
        sq = omega**2 - mass**2
        vac = np.where(omega > mass, 1.0 / np.sqrt(np.where(sq > 0.0, sq, 1.0)), 0.0)
    else:
        raise ScalardetError(
            "worldline spectral weight implemented for massless 3+1 and "
            "massive 1+1 fields"
        )
    if not isinstance(state, Thermal):
        return vac
    # Detailed balance fixes the thermal weight from the vacuum one:
    # What_T(w) = What_vac(w) (1 + n(w)) + What_vac(-w) n(-w), which for the
    # massless 3+1 weight collapses to (w/2pi) / (1 - e^{-w/T}), continuous
    # through w = 0 with value T/2pi.
    beta = 1.0 / state.temperature
    denom = -np.expm1(-beta * omega)
    safe = np.where(np.abs(denom) > 1e-300, denom, 1.0)
    out = np.where(
        np.abs(beta * omega) < 1e-12,
        state.temperature / TWO_PI,
        (omega / TWO_PI) / safe,
    )
    return out


def _window_width(window) -> float | None:
    if window is None:
        return None
    if isinstance(window, SamplingFunctions):
        return window.delta_t
    dt = float(window)
    if dt <= 0:
        raise ValueError("window width must be positive (or None for infinite)")
    return dt


def udw_response(
    traj,
    state,
    eps: float,
    window=None,
    *,
    tau: float = 0.0,
    mass: float = 0.0,
    spatial_dim: int = 3,
    n_quad: int = 1024,
    span: float = 12.0,
) -> float:
    """Worldline detector response at energy transfer eps.

    Parameters
    ----------
    traj : Inertial or UniformAcceleration
        Detector worldline. The vacuum pullback is boost invariant, so an
        inertial detector's vacuum response does not depend on its velocity;
        a thermal bath singles out a rest frame and is supported in the
        comoving frame only. The accelerated response equals the comoving
        thermal response at a/(2 pi); it is computed as a formal result (no
        Hamiltonian generates the accelerated time translations).
    state : Vacuum or Thermal
    eps : float
        Energy gap: eps > 0 is excitation, eps < 0 de-excitation.
    window : None, float, or SamplingFunctions
        Temporal window width dt (None = infinite window; a SamplingFunctions
        contributes its delta_t). The windowed response is the spectral
        weight smeared with ghat(u) = 2 dt sqrt(pi) exp(-u^2 dt^2).
    tau : float
        Worldline anchor time. Accepted for interface symmetry with the
        nonstationary quadrature route; every supported configuration is
        stationary, so the response cannot depend on it.
    mass, spatial_dim : float, int
        Field parameters; see `_spectral_weight` for the supported pairs.
    n_quad, span : int, float
        Windowed-case quadrature resolution and half-width in units of 1/dt.

    Returns
    -------
    float, nonnegative: the normalized response (unit detector matrix
    element), per unit proper time.
    """
    del tau  # stationary configurations only; kept for signature symmetry
    if isinstance(traj, UniformAcceleration):
        if isinstance(state, Thermal):
            raise NonStationaryConfiguration(
                "a thermal bath for a uniformly accelerated detector has no "
                "stationary pullback; supported states are vacuum only"
            )
        if not isinstance(state, Vacuum):
            raise ScalardetError("accelerated response supports the vacuum only")
        if mass != 0.0 or spatial_dim != 3:
            raise ScalardetError(
                "accelerated response implemented for the massless 3+1 field"
            )
        weight_state = Thermal(traj.a / TWO_PI)
    elif isinstance(traj, Inertial):
        if isinstance(state, Thermal) and traj.velocity != 0.0:
            raise NonStationaryConfiguration(
                "thermal response implemented in the bath rest frame only; "
                "a drifting detector sees a direction-dependent Doppler "
                "spectrum this model does not cover"
            )
        weight_state = state
    else:
        raise TypeError("traj must be Inertial or UniformAcceleration")

    dt = _window_width(window)
    if dt is None:
        return float(_spectral_weight(weight_state, -eps, mass, spatial_dim))

    center = -eps
    half = span / dt
    lo, hi = center - half, center + half
    is_thermal = isinstance(weight_state, Thermal)
    n_panels = max(8, n_quad // 16)
    if spatial_dim == 1:
        # Massive 1+1 vacuum: substitute w = m cosh(theta); the substitution
        # absorbs the inverse square-root edge of the spectral weight exactly.
        if hi <= mass:
            return 0.0
        th_lo = np.arccosh(max(lo, mass) / mass)
        th_hi = np.arccosh(hi / mass)
        theta, w = panel_nodes(np.linspace(th_lo, th_hi, n_panels + 1), 16)
        omega = mass * np.cosh(theta)
        ghat = 2.0 * dt * np.sqrt(np.pi) * np.exp(-((eps + omega) * dt) ** 2)
        return float(np.sum(w * ghat) / TWO_PI)
    if not is_thermal:
        # The massless spectral weight vanishes below omega = 0; truncating
        # there keeps the integrand smooth on the remaining interval.
        lo = max(lo, 0.0)
        if hi <= lo:
            return 0.0
    omega, w = panel_nodes(np.linspace(lo, hi, n_panels + 1), 16)
    what = _spectral_weight(weight_state, omega, mass, spatial_dim)
    ghat = 2.0 * dt * np.sqrt(np.pi) * np.exp(-((eps + omega) * dt) ** 2)
    return float(np.sum(w * what * ghat) / TWO_PI)


# ---------------------------------------------------------------------------
# photodetection expansion
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CoherentPulse:
    """Gaussian coherent pulse of mean wavenumber k0 and spectral width delta.

    The coherent amplitude is

        z(k) = z0 (2 pi)^3 (2 pi delta^2)^{-3/2} exp(-|k - k0|^2 / (2 delta^2)),

    normalized so that the measure-weighted amplitude integrates to z0. The
    classical-ray (saddle-point) expansion of the co-rotating term assumes
    |k0| > 3 delta; a pulse violating that carries weight in the deep
    infrared, where the counter-rotating term survives cell averaging, and
    construction warns.
    """

    z0: complex
    k0: tuple[float, float, float]
    delta: float

    def __post_init__(self):
        object.__setattr__(self, "z0", complex(self.z0))
        object.__setattr__(self, "k0", tuple(float(c) for c in self.k0))
        if len(self.k0) != 3:
            raise ValueError("k0 must have three components")
        if self.delta <= 0:
            raise ValueError("delta must be positive")
        if self.kmag0 <= 3.0 * self.delta:
            warnings.warn(
                "pulse mean wavenumber %.3g is not above 3 x spectral width "
                "%.3g; the classical-ray expansion is unreliable this deep in "
                "the infrared" % (self.kmag0, self.delta),
                ScaleSeparationWarning,
                stacklevel=2,
            )

    @property
    def kmag0(self) -> float:
        return float(np.sqrt(sum(c * c for c in self.k0)))

    def amplitude(self, kvecs) -> np.ndarray:
        """z(k) sampled at an (..., 3) array of wavevectors."""
        kvecs = np.asarray(kvecs, dtype=float)
        d2 = np.sum((kvecs - np.asarray(self.k0)) ** 2, axis=-1)
        norm = TWO_PI**3 * (TWO_PI * self.delta**2) ** (-1.5)
        return self.z0 * norm * np.exp(-d2 / (2.0 * self.delta**2))


@dataclass(eq=False)
class PulseGrid:
    """Tensor-product momentum box for pulse integrals (massless, 3 spatial).

    weights carry the (2 pi)^-3 measure; nodes with |k| below half an axis
    spacing get zero weight (deep-infrared exclusion, where the 1/sqrt(2 w)
    mode normalization is singular).
    """

    kvecs: np.ndarray
    weights: np.ndarray
    omega: np.ndarray

    def __post_init__(self):
        self.kvecs = np.asarray(self.kvecs, dtype=float)
        self.weights = np.asarray(self.weights, dtype=float)
        self.omega = np.asarray(self.omega, dtype=float)
        n = self.kvecs.shape[0]
        if self.kvecs.shape != (n, 3):
            raise ValueError("kvecs must be (n, 3)")
        if self.weights.shape != (n,) or self.omega.shape != (n,):
            raise ValueError("weights and omega must match kvecs")

    @property
    def n(self) -> int:
        return self.kvecs.shape[0]


def pulse_grid(
    pulse: CoherentPulse, n_per_axis: int = 15, span: float = 5.0
) -> PulseGrid:
    """Trapezoid box grid covering k0 +- span * delta along each axis.

    A Gaussian sampled on this box with ~15 nodes per axis is integrated to
    better than 1e-8 relative (trapezoid rules are spectrally accurate on
    smooth rapidly decaying integrands); the span keeps the truncated tail
    below e^{-span^2}.
    """
    if n_per_axis < 5:
        raise ValueError("need at least 5 nodes per axis")
    axes = [
        np.linspace(c - span * pulse.delta, c + span * pulse.delta, n_per_axis)
        for c in pulse.k0
    ]
    w1 = [trapezoid_weights(ax) for ax in axes]
    mesh = np.meshgrid(*axes, indexing="ij")
    kvecs = np.stack([m.ravel() for m in mesh], axis=1)
    weights = (
        w1[0][:, None, None] * w1[1][None, :, None] * w1[2][None, None, :]
    ).ravel() / TWO_PI**3
    omega = np.sqrt(np.sum(kvecs**2, axis=1))
    h = 2.0 * span * pulse.delta / (n_per_axis - 1)
    weights = np.where(omega < 0.5 * h, 0.0, weights)
    return PulseGrid(kvecs, weights, omega)


@dataclass(frozen=True)
class GlauberTerms:
    """The three photodetection contributions at a single spacetime point."""

    p0: float
    p1: float
    p2: float
    cutoff: float
    uv_divergent: bool

    @property
    def total(self) -> float:
        return self.p0 + self.p1 + self.p2

    @property
    def rwa(self) -> float:
        return self.p0 + self.p1


@dataclass(eq=False)
class GlauberScan:
    """Photodetection terms sampled along a list of spacetime points."""

    p0: float
    p1: np.ndarray
    p2: np.ndarray
    cutoff: float
    uv_divergent: bool

    @property
    def total(self) -> np.ndarray:
        return self.p0 + self.p1 + self.p2

    @property
    def rwa(self) -> np.ndarray:
        return self.p0 + self.p1


def _as_point4(x) -> np.ndarray:
    if isinstance(x, SpacetimePoint):
        if x.dim != 3:
            raise ValueError("photodetection operates in 3 spatial dimensions")
        return np.array([x.t, *x.x], dtype=float)
    arr = np.asarray(x, dtype=float)
    if arr.shape != (4,):
        raise ValueError("a spacetime point needs (t, x, y, z)")
    return arr


def _vacuum_floor(kernel: DetectorKernel, k_max):
    """State-independent floor with cutoff provenance.

    Flat responses have no finite total: without an explicit cutoff they
    raise QuadratureDivergence, with one they are tagged uv_divergent. For
    the Gaussian-energy family the default cutoff places the profile at
    e^{-100} of its peak. The radial rule is Gauss-Legendre over panels
    (panel edges at the table nodes for tabulated responses, where the
    interpolant has kinks) and is convergence-checked by raising the
    per-panel order.
    """
    if k_max is None:
        if isinstance(kernel, GaussianEnergy) and kernel.tau > 0:
            k_max = float(kernel.e0 + kernel.band_mass + 10.0 / kernel.tau)
        elif isinstance(kernel, TabulatedOnShell):
            k_max = float(kernel.momenta[-1])
        else:
            raise QuadratureDivergence(
                "a flat response has no finite floor; pass an explicit k_max"
            )
    k_max = float(k_max)
    if isinstance(kernel, TabulatedOnShell):
        inner = np.asarray(kernel.momenta, dtype=float)
        inner = inner[(inner > 0.0) & (inner < k_max)]
        edges = np.unique(np.concatenate(([0.0], inner, [k_max])))
    else:
        n_panels = 64
        if isinstance(kernel, GaussianEnergy):
            # keep several panels across the 1/tau width of sharp responses
            n_panels += int(2.0 * k_max * kernel.tau)
        edges = np.linspace(0.0, k_max, n_panels + 1)

    def rule(order: int) -> float:
        k, w = panel_nodes(edges, order)
        return float(np.sum(w * k * kernel_profile(kernel, k)) / (4.0 * np.pi**2))

    base, check = rule(12), rule(18)
    if abs(check - base) > max(1e-13, 1e-9 * abs(check)):
        raise QuadratureDivergence(
            "radial floor quadrature moved by %.3e under order refinement; "
            "pass a tighter k_max or tabulate the response more finely"
            % abs(check - base)
        )
    edge = float(kernel_profile(kernel, k_max)) * k_max**2 / (4.0 * np.pi**2)
    uv = bool(
        isinstance(kernel, MaximalLocalization)
        or edge > 1e-6 * max(abs(check), 1e-300)
    )
    return check, k_max, uv


def glauber_profile(
    pulse: CoherentPulse,
    kernel: DetectorKernel,
    points,
    *,
    sampling: SamplingFunctions | None = None,
    grid: PulseGrid | None = None,
    k_max: float | None = None,
    threads: int = 1,
    with_p2: bool = True,
    chunk: int = 128,
) -> GlauberScan:
    """Photodetection terms at an array of points (rows of t, x, y, z).

    The pair sums run over row chunks whose layout depends only on the grid
    size; per-chunk partials are reduced in chunk order, so the result is
    independent of `threads`. With a SamplingFunctions, each pair entry
    carries the cell-averaging factor at its own frequency/momentum transfer:
    (w - w', k - k') for the co-rotating term, (w + w', k + k') for the
    counter-rotating one. The floor is always unaveraged (its phase is
    constant, so averaging acts trivially).
    """
    points = np.asarray(points, dtype=float)
    if points.ndim != 2 or points.shape[1] != 4:
        raise ValueError("points must be an (n, 4) array of (t, x, y, z) rows")
    if grid is None:
        grid = pulse_grid(pulse)
    p0, cutoff, uv = _vacuum_floor(kernel, k_max)

    z = pulse.amplitude(grid.kvecs)
    live = grid.weights > 0.0
    safe_omega = np.where(live, grid.omega, 1.0)
    a = np.where(live, grid.weights * z / np.sqrt(2.0 * safe_omega), 0.0)
    # positive-frequency phases e^{-i w t + i k.x} at every output point
    phase = np.exp(
        -1j * np.outer(grid.omega, points[:, 0]) + 1j * (grid.kvecs @ points[:, 1:].T)
    )
    amp = a[:, None] * phase  # (n_modes, n_points)

    kv = grid.kvecs
    om = grid.omega

    def worker(rng):
        i0, i1 = rng
        ki = kv[i0:i1]
        wi = om[i0:i1]
        dvec = ki[:, None, :] - kv[None, :, :]
        dmag = np.sqrt(np.sum(dvec * dvec, axis=-1))
        svec = ki[:, None, :] + kv[None, :, :]
        smag = np.sqrt(np.sum(svec * svec, axis=-1))
        m1 = kernel_profile(kernel, 0.5 * smag)
        if sampling is not None:
            m1 = m1 * sampling.average_factor(wi[:, None] - om[None, :], dmag)
        part1 = np.sum(np.conj(amp[i0:i1]) * (m1 @ amp), axis=0)
        if not with_p2:
            return part1, None
        m2 = kernel_profile(kernel, 0.5 * dmag)
        if sampling is not None:
            m2 = m2 * sampling.average_factor(wi[:, None] + om[None, :], smag)
        part2 = np.sum(amp[i0:i1] * (m2 @ amp), axis=0)
        return part1, part2

    parts = run_chunked(worker, chunk_ranges(grid.n, chunk), threads)
    tot1 = np.zeros(points.shape[0], dtype=complex)
    tot2 = np.zeros(points.shape[0], dtype=complex)
    for part1, part2 in parts:
        tot1 += part1
        if part2 is not None:
            tot2 += part2
    p1 = _take_real(tot1, "co-rotating photodetection term")
    p2 = 2.0 * tot2.real
    return GlauberScan(p0=p0, p1=p1, p2=p2, cutoff=cutoff, uv_divergent=uv)


def glauber_terms(
    pulse: CoherentPulse,
    kernel: DetectorKernel,
    x,
    *,
    sampling: SamplingFunctions | None = None,
    grid: PulseGrid | None = None,
    k_max: float | None = None,
    threads: int = 1,
) -> GlauberTerms:
    """Floor, co-rotating, and counter-rotating terms at one spacetime point."""
    pt = _as_point4(x)
    scan = glauber_profile(
        pulse,
        kernel,
        pt[None, :],
        sampling=sampling,
        grid=grid,
        k_max=k_max,
        threads=threads,
    )
    return GlauberTerms(
        scan.p0, float(scan.p1[0]), float(scan.p2[0]), scan.cutoff, scan.uv_divergent
    )


def rwa_density(
    pulse: CoherentPulse,
    kernel: DetectorKernel,
    x,
    *,
    sampling: SamplingFunctions | None = None,
    grid: PulseGrid | None = None,
    k_max: float | None = None,
    threads: int = 1,
) -> float:
    """Rotating-wave detection density: the kept floor + co-rotating content.

    Computed from the same deterministic pair reduction as `glauber_terms`
    with the counter-rotating block skipped, so it coincides with p0 + p1 of
    the full expansion identically.
    """
    pt = _as_point4(x)
    scan = glauber_profile(
        pulse,
        kernel,
        pt[None, :],
        sampling=sampling,
        grid=grid,
        k_max=k_max,
        threads=threads,
        with_p2=False,
    )
    return float(scan.p0 + scan.p1[0])


def glauber_point_limit(
    pulse: CoherentPulse,
    x,
    *,
    k_max: float | None = None,
    grid: PulseGrid | None = None,
    n_per_axis: int = 15,
    span: float = 5.0,
) -> RateResult:
    """Pointlike (delta-kernel) detection density at x.

    Replacing the kernel by a delta sets the profile to 1: the floor becomes
    the quadratically divergent int_{|k|<K} d3k/(2pi)^3 / (2w) = K^2/(8 pi^2),
    regulated by the cutoff and tagged as such, while the pulse part closes
    into |chi(x)|^2 with chi(x) = int d3k/(2pi)^3 z(k) e^{-i k.x}/sqrt(2 w_k),
    quadratic in the pulse amplitude.
    """
    pt = _as_point4(x)
    if k_max is None:
        k_max = 3.0 * max(pulse.kmag0, pulse.delta)
    if grid is None:
        grid = pulse_grid(pulse, n_per_axis, span)
    z = pulse.amplitude(grid.kvecs)
    live = grid.weights > 0.0
    safe_omega = np.where(live, grid.omega, 1.0)
    a = np.where(live, grid.weights * z / np.sqrt(2.0 * safe_omega), 0.0)
    chi = np.sum(a * np.exp(-1j * grid.omega * pt[0] + 1j * (grid.kvecs @ pt[1:])))
    vac = k_max**2 / (8.0 * np.pi**2)
    return RateResult(float(vac + np.abs(chi) ** 2), float(k_max), True)
