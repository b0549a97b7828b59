"""Two-point (Wightman) functions: mode sums, closed forms, worldline pullbacks.

W(x, x') = <phi(x) phi(x')> in the given state. The first argument is the
*left* operator. Closed forms use the standard i-epsilon prescription in the
time difference, W ~ W(t - t' - i eps); with eps = 0 they are singular on the
light cone and raise NullSeparationSingularity there.

Thermal equilibrium enters only through worldline pullbacks (3+1, massless):
W_T(s) for the comoving observer is expressed through the trigamma function,

    W_T(s) = [psi_1(eps/beta + i s/beta) + psi_1(1 + eps/beta - i s/beta)]
             / (4 pi^2 beta^2),

which satisfies the KMS boundary condition W_T(s - i beta) = W_T(-s) exactly
at finite eps (a truncated image sum does not: it is periodic instead).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .._num import trigamma
from ..errors import NonStationaryConfiguration, NullSeparationSingularity
from .types import TWO_PI, MomentumGrid, SpacetimePoint


@dataclass(frozen=True)
class Thermal:
    """Thermal equilibrium state specification at temperature T > 0."""

    temperature: float

    def __post_init__(self):
        if self.temperature <= 0:
            raise ValueError("temperature must be positive")


def wightman_modesum(
    grid: MomentumGrid, xa: SpacetimePoint, xb: SpacetimePoint, eps: float = 0.0
) -> complex:
    """Vacuum Wightman function on the discretized 1+1 momentum grid.

    A finite mode sum needs no regulator; eps > 0 damps each mode by
    exp(-w eps) and is only used when probing convergence toward the
    continuum.
    """
    dt = xa.t - xb.t
    dx = xa.x[0] - xb.x[0]
    w = grid.energies
    phase = np.exp(-1j * w * (dt - 1j * eps) + 1j * grid.points * dx)
    return complex(np.sum(grid.measure * grid.inv_two_energy * phase))


def wightman_modesum_delta(grid: MomentumGrid, dt, dx, eps: float = 0.0):
    """Vectorized mode-sum Wightman function of the separation (dt, dx).

    dt and dx broadcast against each other; the mode axis is contracted.
    """
    dt = np.asarray(dt, dtype=float)[..., None]
    dx = np.asarray(dx, dtype=float)[..., None]
    w = grid.energies
    phase = np.exp(-1j * w * (dt - 1j * eps) + 1j * grid.points * dx)
    return np.sum(grid.measure * grid.inv_two_energy * phase, axis=-1)


def wightman_vacuum(
    xa: SpacetimePoint, xb: SpacetimePoint, eps: float
) -> complex:
    """Closed-form massless vacuum Wightman function in 3+1 dimensions.

    W(x, x') = -1 / (4 pi^2 [(dt - i eps)^2 - |dx|^2]).

    At coincidence this is +1/(4 pi^2 eps^2): real, positive, and divergent as
    eps -> 0, which is the expected short-distance behavior.
    """
    if xa.dim != 3 or xb.dim != 3:
        raise ValueError("closed form implemented for 3 spatial dimensions")
    dt = xa.t - xb.t
    dx2 = sum((a - b) ** 2 for a, b in zip(xa.x, xb.x))
    denom = (dt - 1j * eps) ** 2 - dx2
    if denom == 0:
        raise NullSeparationSingularity(
            "null separation with eps = 0; supply a positive regulator"
        )
    return complex(-1.0 / (4.0 * np.pi**2 * denom))


def wightman_pullback_inertial(state, v: float, s, eps: float):
    """Wightman function pulled back to an inertial worldline, vs proper time.

    Parameters
    ----------
    state : Vacuum-like sentinel or Thermal
        Pass a Thermal instance for a heat bath; anything else (conventionally
        the string "vacuum" or a Vacuum instance) selects the vacuum.
    v : float
        Detector 3-velocity (|v| < 1). The vacuum pullback is boost invariant,
        so v only matters for the thermal case -- which is implemented for the
        comoving frame only (the bath singles out a rest frame, and a drifting
        detector sees a direction-dependent Doppler spectrum we do not model).
    s : array_like
        Proper-time separations.
    eps : float
        Regulator, applied in proper time (the boost-invariant choice).

    Returns
    -------
    complex ndarray with the same shape as s.
    """
    if abs(v) >= 1.0:
        raise ValueError("need |v| < 1")
    s = np.asarray(s, dtype=float)
    if isinstance(state, Thermal):
        if v != 0.0:
            raise NonStationaryConfiguration(
                "thermal pullback implemented in the comoving frame only"
            )
        beta = 1.0 / state.temperature
        if eps <= 0:
            raise ValueError("thermal closed form needs eps > 0")
        za = eps / beta + 1j * s / beta
        zb = 1.0 + eps / beta - 1j * s / beta
        return (trigamma(za) + trigamma(zb)) / (4.0 * np.pi**2 * beta**2)
    denom = (s - 1j * eps) ** 2
    if eps == 0 and np.any(s == 0):
        raise NullSeparationSingularity("coincident points with eps = 0")
    return -1.0 / (4.0 * np.pi**2 * denom)


def wightman_pullback_accelerated(a: float, s, eps: float):
    """Vacuum Wightman function along a uniformly accelerated worldline.

    Equal to the comoving thermal pullback at the associated temperature
    T = a / (2 pi) -- exposed for the formal accelerated-response path; not
    part of the validated surface.
    """
    if a <= 0:
        raise ValueError("acceleration must be positive")
    return wightman_pullback_inertial(Thermal(a / TWO_PI), 0.0, s, eps)
