"""Single-event detection densities and arrival-time distributions.

The master object is the smeared two-point function of the field: for a
detector at X with response kernel R,

    P(X) = int d^{d+1}y R(y) G(X + y/2 ; X - y/2),

with G the contour two-point function (backward-branch point first). For the
time-pointlike kernel families this collapses to momentum sums against the
kernel profile evaluated at on-shell momentum averages:

- vacuum: a state-independent constant rate sum_k mu_k R~(k) / (2 w_k);
- one-quantum states: the vacuum floor plus an interference double sum
  weighted by R~((k + k')/2);
- coherent pulses in 3+1: delegated to the photodetection expansion.

Arrival-time densities condition on the detector firing *because of the
particle*: `toa_density` keeps only the particle-sector (co-rotating) term.
The vacuum floor is a uniform dark-count background that would otherwise
dominate the conditioning over long observation windows; excluding it is part
of what "time of arrival" means here.

Sign conventions inherited from the field core: a right-moving packet
(positive momenta) arrives at positive detector positions at positive times.
"""
from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, field as dc_field

import numpy as np

from ._num import chunk_ranges, run_chunked, trapezoid_weights
from .detector import (
    DetectorKernel,
    MaximalLocalization,
    SamplingFunctions,
    kernel_profile,
    localization_matrix,
)
from .errors import (
    GridTooCoarse,
    NegativeDensity,
    NonForwardState,
    PerturbativeRegimeWarning,
    ScalardetError,
    ZeroDetection,
)
from .field.types import (
    MomentumGrid,
    SingleParticle,
    SpacetimePoint,
    Vacuum,
)

__all__ = [
    "ProbabilityGrid",
    "RateResult",
    "vacuum_rate",
    "vacuum_rate_spherical",
    "detection_density",
    "toa_density",
    "normalize_conditioned",
    "convolve_sampling",
    "write_csv",
    "write_meta",
]

IMAG_TOL = 1e-10
CLAMP_FLOOR = -1e-8
ZERO_DETECTION_FLOOR = 1e-14
P_DET_WARN = 0.1


@dataclass
class ProbabilityGrid:
    """Sampled probability density over a rectangular axis grid.

    kind is "raw" (unnormalized detection density) or "conditioned"
    (normalized over the stored axes after conditioning on detection).
    clamp_mass records the total probability removed by clamping tiny
    negative excursions (always below the |CLAMP_FLOOR| scale).
    """

    axes: tuple
    values: np.ndarray
    kind: str = "raw"
    p_det: float | None = None
    clamp_mass: float = 0.0
    meta: dict = dc_field(default_factory=dict)

    def axis_weights(self):
        return [trapezoid_weights(ax) for ax in self.axes]

    def integral(self) -> float:
        total = self.values
        for axis_index in reversed(range(len(self.axes))):
            w = trapezoid_weights(self.axes[axis_index])
            total = np.tensordot(total, w, axes=([axis_index], [0]))
        return float(total)


@dataclass(frozen=True)
class RateResult:
    """A constant detection rate, with its regularization provenance."""

    value: float
    cutoff: float
    uv_divergent: bool


def _take_real(values, where: str):
    values = np.asarray(values)
    scale = max(1.0, float(np.max(np.abs(values.real))) if values.size else 1.0)
    resid = float(np.max(np.abs(values.imag))) if values.size else 0.0
    if resid > IMAG_TOL * scale:
        raise ScalardetError(
            "imaginary residue %.3e in %s exceeds tolerance" % (resid, where)
        )
    return values.real.copy()


def _clamp_negative(values, where: str):
    """Clamp round-off negativity; genuine negativity raises NegativeDensity."""
    values = np.asarray(values, dtype=float)
    scale = max(1.0, float(np.max(np.abs(values))) if values.size else 1.0)
    floor = CLAMP_FLOOR * scale
    if np.any(values < floor):
        raise NegativeDensity(
            "density in %s reaches %.3e, below the clamp floor %.3e"
            % (where, float(np.min(values)), floor)
        )
    neg = values < 0.0
    clamp_mass = float(-np.sum(values[neg])) + 0.0  # normalize -0.0
    values = values.copy()
    values[neg] = 0.0
    return values, clamp_mass


def vacuum_rate(kernel: DetectorKernel, grid: MomentumGrid) -> RateResult:
    """State-independent detection rate on the 1+1 momentum grid."""
    prof = kernel_profile(kernel, np.abs(grid.points))
    value = float(np.sum(grid.measure * grid.inv_two_energy * prof))
    return RateResult(value, grid.p_max, isinstance(kernel, MaximalLocalization))


def vacuum_rate_spherical(kernel: DetectorKernel, k_max: float, n_k: int = 4096) -> RateResult:
    """State-independent rate in 3+1 (massless), int k dk R~(k) / (4 pi^2).

    Grid-cutoff regulated; flat kernels are genuinely UV divergent and are
    tagged as such.
    """
    k = np.linspace(0.0, k_max, n_k)
    w = trapezoid_weights(k)
    value = float(np.sum(w * k * kernel_profile(kernel, k)) / (4.0 * np.pi**2))
    return RateResult(value, k_max, isinstance(kernel, MaximalLocalization))


def _single_particle_pair_matrix(state, kernel, sampling):
    """Hermitian pair matrix for the one-quantum interference term.

    M_ij = cbar_i c_j g_i g_j * R~((k_i+k_j)/2) [* averaging], with g_j the
    phi-expansion mode couplings, so the particle-sector density at (t, X) is
    2 * sum_ij M_ij e^{i(w_i-w_j)t} e^{-i(k_i-k_j)X}.  Carrying the full
    couplings (not just 1/sqrt(2 w_j)) keeps the sum a discretization of the
    continuum double integral and matches exact diagonalization on the same
    grid.
    """
    grid = state.grid
    c = state.discrete_amplitudes()
    k = grid.points
    w = grid.energies
    prof = kernel_profile(kernel, 0.5 * np.abs(k[:, None] + k[None, :]))
    if sampling is not None:
        prof = prof * sampling.average_factor(
            w[:, None] - w[None, :], k[:, None] - k[None, :]
        )
    amp = c * grid.mode_couplings
    return np.conj(amp)[:, None] * amp[None, :] * prof


def detection_density(
    state,
    kernel: DetectorKernel,
    xs,
    grid: MomentumGrid | None = None,
    sampling: SamplingFunctions | None = None,
):
    """Detection density at a list of spacetime points.

    Supported: Vacuum (needs an explicit grid; constant density), and 1+1
    SingleParticle states (vacuum floor + interference term). Coherent pulses
    in 3+1 go through the photodetection expansion in `scalardet.limits`
    (use `glauber_terms` / `rwa_density` directly, or pass a CoherentPulse
    here to delegate).

    With a SamplingFunctions instance the density is window-averaged in the
    momentum representation (exactly equivalent to convolving the pointwise
    density with the normalized window).
    """
    if isinstance(state, Vacuum):
        if grid is None:
            raise ValueError("vacuum density needs an explicit momentum grid")
        rate = vacuum_rate(kernel, grid).value
        return np.full(len(xs), rate)
    if isinstance(state, SingleParticle):
        if sampling is not None:
            sampling.check_scale_separation(kernel)
        m = _single_particle_pair_matrix(state, kernel, sampling)
        g = state.grid
        t = np.array([p.t for p in xs], dtype=float)
        x = np.array([p.x[0] for p in xs], dtype=float)
        phase = np.exp(
            1j * g.energies[None, :] * t[:, None] - 1j * g.points[None, :] * x[:, None]
        )
        interference = 2.0 * np.einsum("ai,ij,aj->a", phase, m, np.conj(phase))
        interference = _take_real(interference, "detection_density")
        floor = vacuum_rate(kernel, g).value
        values, _ = _clamp_negative(interference + floor, "detection_density")
        return values
    from .limits import CoherentPulse, glauber_terms  # deferred: no import cycle

    if isinstance(state, CoherentPulse):
        terms = glauber_terms(state, kernel, xs, sampling=sampling)
        return terms.total
    raise TypeError("unsupported state family for detection_density: %r" % (state,))


def toa_density(
    state,
    kernel: DetectorKernel,
    L: float,
    t_grid,
    sampling: SamplingFunctions | None = None,
    method: str = "spectral",
    threads: int = 1,
) -> ProbabilityGrid:
    """Arrival-time density at a detector a distance L from the source.

    Normalized flux form: with rho the one-particle momentum density matrix,
    v_p = |p|/eps_p the group speed and S(p, p') the unit-diagonal
    localization matrix of the kernel,

        P(t, L) = sum_{ij} mu_i mu_j sqrt(v_i v_j) rho_ij S_ij
                  e^{i(p_i - p_j)L - i(eps_i - eps_j)t},

    which for a forward-moving packet and maximal localization (S = 1)
    integrates to 1 over the whole real line: the arrival statistics of the
    whole particle, conditioned on its eventual detection. Only the
    coherence structure of the kernel enters (through S); its overall
    amplitude and on-shell profile cancel in the normalization.

    Vacuum-floor contributions are excluded by construction: the floor is a
    constant dark-count rate whose weight under conditioning would grow with
    the observation window and wash out the arrival peak. The raw grid is
    tagged `particle_sector_only`.

    state : SingleParticle (pure) or MixedParticle (tabulated rho).
    method : {"spectral", "matrix"}
        Same contract, different contraction order; each checks the other.
    """
    from .field.types import MixedParticle  # local: keep module import light

    if sampling is not None:
        sampling.check_scale_separation(kernel)
    t_grid = np.asarray(t_grid, dtype=float)
    if isinstance(state, SingleParticle):
        g = state.grid
        c = state.discrete_amplitudes()
        mean_p = float(np.sum(np.abs(c) ** 2 * g.points))
    elif isinstance(state, MixedParticle):
        g = state.grid
        mean_p = float(np.real(np.sum(g.measure * g.points * np.diag(state.rho))))
    else:
        raise TypeError("toa_density needs a one-particle (pure or mixed) state")
    if mean_p <= 0.0:
        warnings.warn(
            "mean momentum %.3g is not toward the detector" % mean_p,
            NonForwardState,
            stacklevel=2,
        )

    speed = np.where(g.energies > 0.0, np.abs(g.points) / g.energies, 0.0)
    if isinstance(state, SingleParticle):
        amp = np.sqrt(g.measure * speed) * c
        pair = np.outer(amp, np.conj(amp))
    else:
        flux = g.measure * np.sqrt(speed)
        pair = np.outer(flux, flux) * state.rho
    pair = pair * localization_matrix(kernel, g.points)
    if sampling is not None:
        pair = pair * sampling.average_factor(
            g.energies[:, None] - g.energies[None, :], g.points[:, None] - g.points[None, :]
        )
    pos = np.exp(1j * g.points * float(L))
    pair = pos[:, None] * pair * np.conj(pos)[None, :]

    if method == "spectral":
        chunks = chunk_ranges(t_grid.size, 64)

        def worker(rng):
            a, b = rng
            ph = np.exp(1j * np.outer(t_grid[a:b], g.energies))
            inner = ph @ pair.T
            return np.sum(ph.conj() * inner, axis=1)

        parts = run_chunked(worker, chunks, threads=threads)
        vals = np.concatenate(parts) if parts else np.zeros(0, dtype=complex)
    elif method == "matrix":
        vals = np.empty(t_grid.size, dtype=complex)
        for i, t in enumerate(t_grid):
            ph = np.exp(1j * g.energies * t)
            vals[i] = np.vdot(ph, pair @ ph)
    else:
        raise ValueError("method must be 'spectral' or 'matrix'")

    vals = _take_real(vals, "toa_density")
    vals, clamp = _clamp_negative(vals, "toa_density")
    meta = {
        "distance": float(L),
        "method": method,
        "particle_sector_only": True,
        # the flux form strips the kernel amplitude, so its total is ~1 for a
        # forward packet by construction -- not a strained expansion
        "flux_normalized": True,
    }
    return ProbabilityGrid(axes=(t_grid,), values=vals, kind="raw", clamp_mass=clamp, meta=meta)


def normalize_conditioned(pgrid: ProbabilityGrid) -> ProbabilityGrid:
    """Condition on detection: normalize the raw density over its axes.

    Raises ZeroDetection when the total weight is below 1e-14 (nothing to
    condition on); warns when the total detection probability exceeds 0.1,
    where the underlying first-order expansion starts to strain.
    """
    if pgrid.kind != "raw":
        raise ValueError("can only condition a raw density")
    p_det = pgrid.integral()
    if p_det < ZERO_DETECTION_FLOOR:
        raise ZeroDetection("total detection probability %.3e below floor" % p_det)
    if p_det > P_DET_WARN and not pgrid.meta.get("flux_normalized", False):
        warnings.warn(
            "total detection probability %.3g exceeds %.2g; first-order "
            "conditioning is strained" % (p_det, P_DET_WARN),
            PerturbativeRegimeWarning,
            stacklevel=2,
        )
    return ProbabilityGrid(
        axes=pgrid.axes,
        values=pgrid.values / p_det,
        kind="conditioned",
        p_det=p_det,
        clamp_mass=pgrid.clamp_mass,
        meta=dict(pgrid.meta),
    )


# widths this far below the grid spacing are unresolvable and act as identity
IDENTITY_WIDTH_FACTOR = 1e-3
MIN_POINTS_PER_WIDTH = 4


def convolve_sampling(pgrid: ProbabilityGrid, sampling: SamplingFunctions) -> ProbabilityGrid:
    """Convolve a sampled density with the normalized window sigma = f^2/nu.

    Axis 0 is temporal (width dt/sqrt(2), the width of f^2), any further axes
    spatial. Each axis kernel is column-normalized against the trapezoid
    weights, so the total integral is preserved to rounding even near the
    domain edges. Raises GridTooCoarse when an axis cannot resolve its
    width; widths far below the grid spacing act as the identity.
    """
    values = pgrid.values.copy()
    widths = [sampling.delta_t / np.sqrt(2.0)] + [
        sampling.delta_x / np.sqrt(2.0)
    ] * (len(pgrid.axes) - 1)
    for axis_index, (ax, width) in enumerate(zip(pgrid.axes, widths)):
        spacing = float(ax[1] - ax[0])
        if width < IDENTITY_WIDTH_FACTOR * spacing:
            continue
        if width < MIN_POINTS_PER_WIDTH * spacing:
            raise GridTooCoarse(
                "axis %d spacing %g cannot resolve window width %g"
                % (axis_index, spacing, width)
            )
        w = trapezoid_weights(ax)
        kernel = np.exp(-((ax[:, None] - ax[None, :]) ** 2) / (2.0 * width**2))
        kernel *= w[:, None]
        kernel /= np.sum(kernel, axis=0)[None, :]
        values = np.moveaxis(
            np.tensordot(kernel, np.moveaxis(values, axis_index, 0), axes=([1], [0])),
            0,
            axis_index,
        )
    out = ProbabilityGrid(
        axes=pgrid.axes,
        values=values,
        kind=pgrid.kind,
        p_det=pgrid.p_det,
        clamp_mass=pgrid.clamp_mass,
        meta=dict(pgrid.meta),
    )
    out.meta["window"] = {"delta_t": sampling.delta_t, "delta_x": sampling.delta_x}
    return out


def write_csv(pgrid: ProbabilityGrid, path, columns=("t", "density")):
    """Write a 1-d density as CSV with full round-trip precision."""
    if len(pgrid.axes) != 1:
        raise ValueError("CSV export implemented for 1-d grids")
    with open(path, "w") as fh:
        fh.write(",".join(columns) + "\n")
        for t, v in zip(pgrid.axes[0], pgrid.values):
            fh.write("%.16e,%.16e\n" % (t, v))


def write_meta(pgrid: ProbabilityGrid, path, extra: dict | None = None):
    meta = {
        "kind": pgrid.kind,
        "p_det": pgrid.p_det,
        "clamp_mass": pgrid.clamp_mass,
        "n_samples": int(pgrid.values.size),
    }
    meta.update(pgrid.meta)
    if extra:
        meta.update(extra)
    with open(path, "w") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True)
        fh.write("\n")
