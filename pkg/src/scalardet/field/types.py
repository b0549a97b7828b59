"""Core types: spacetime points, discretized momentum space, field states.

Conventions used consistently across the package:

- units hbar = c = 1, metric signature (+,-,-,-), k.x = omega*t - kvec.xvec;
  a plane wave of momentum p is exp(i p x - i omega t).
- mode expansion phi(x) = int d^dk/(2pi)^d (2 w_k)^(-1/2) [a(k) e^{-ik.x} + h.c.]
  with [a(k), a'(k')] = (2pi)^d delta^d(k - k').
- one-particle wavefunctions carry the measure dp/(2pi):
  |psi> = int dp/(2pi) psi(p) a'(p)|0>,  <psi|psi> = int dp/(2pi) |psi(p)|^2.
- momentum integrals are discretized with trapezoid weights w_j:
  int dp/(2pi) F(p) -> sum_j (w_j / 2pi) F(p_j).

Massless grids exclude modes below k_min = p_max / n_points (their weights are
zeroed) so that 1/sqrt(2w) stays finite; the excluded shell is an IR cutoff an
order of magnitude below any physical scale of the configurations we run.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from ..errors import CoarseGridWarning, GridError

TWO_PI = 2.0 * np.pi

# Production grids below this size trigger a warning: they exist only so the
# exact-diagonalization oracle (whose Hilbert space grows exponentially in the
# mode count) can share the discretization.
RECOMMENDED_MIN_POINTS = 16


@dataclass(frozen=True)
class SpacetimePoint:
    """Event (t, xvec) in d+1 dimensions; xvec is a plain tuple of floats."""

    t: float
    x: tuple[float, ...]

    @property
    def dim(self) -> int:
        return len(self.x)


def point(t: float, *xs: float) -> SpacetimePoint:
    """Shorthand constructor: point(t, x), point(t, x, y, z)."""
    return SpacetimePoint(float(t), tuple(float(v) for v in xs))


@dataclass(eq=False)
class MomentumGrid:
    """Uniform 1-d momentum grid with trapezoid weights for a field of given mass.

    Attributes
    ----------
    points : ndarray
        Node momenta, uniformly spaced on [-p_max, p_max].
    weights : ndarray
        Trapezoid weights; zeroed on the IR-excluded shell for mass == 0.
    mass : float
        Field mass entering the dispersion relation.
    """

    points: np.ndarray
    weights: np.ndarray
    mass: float
    p_max: float

    @property
    def n(self) -> int:
        return self.points.size

    @property
    def spacing(self) -> float:
        return float(self.points[1] - self.points[0])

    @cached_property
    def energies(self) -> np.ndarray:
        return dispersion(self.points, self.mass)

    @cached_property
    def measure(self) -> np.ndarray:
        """w_j / (2 pi), ready to contract against mode sums."""
        return self.weights / TWO_PI

    @cached_property
    def inv_two_energy(self) -> np.ndarray:
        """1/(2 w_j), forced to zero on zero-weight (IR-excluded) nodes.

        Every mode sum carries measure * inv_two_energy, so the excluded
        nodes drop out without ever forming 0/0.
        """
        out = np.zeros(self.n)
        ok = self.weights > 0
        out[ok] = 1.0 / (2.0 * self.energies[ok])
        return out

    @cached_property
    def mode_couplings(self) -> np.ndarray:
        """g_j = sqrt((w_j/2pi) / (2 w_j)): the phi-expansion coefficients."""
        return np.sqrt(self.measure * self.inv_two_energy)


def dispersion(p, mass: float):
    """Relativistic dispersion relation w(p) = sqrt(p^2 + m^2)."""
    return np.sqrt(np.asarray(p, dtype=float) ** 2 + float(mass) ** 2)


def momentum_grid(n_points: int, p_max: float, mass: float) -> MomentumGrid:
    """Build the standard symmetric momentum grid.

    For a massless field, nodes with |p| < p_max / n_points get zero weight
    (IR exclusion); the grid geometry itself is unchanged so array shapes stay
    a function of n_points alone.
    """
    if n_points < 2:
        raise GridError("momentum grid needs at least 2 points")
    if p_max <= 0:
        raise GridError("p_max must be positive")
    if mass < 0:
        raise GridError("mass must be non-negative")
    if n_points < RECOMMENDED_MIN_POINTS:
        warnings.warn(
            "momentum grid below %d points; fine for exact-diagonalization "
            "cross-checks, unconverged for production use" % RECOMMENDED_MIN_POINTS,
            CoarseGridWarning,
            stacklevel=2,
        )
    pts = np.linspace(-p_max, p_max, n_points)
    w = np.full(n_points, pts[1] - pts[0])
    w[0] *= 0.5
    w[-1] *= 0.5
    if mass == 0.0:
        k_min = p_max / n_points
        w[np.abs(pts) < k_min] = 0.0
    return MomentumGrid(points=pts, weights=w, mass=float(mass), p_max=float(p_max))


def default_p_max(mass: float, p0: float = 0.0, dp: float = 0.0) -> float:
    """Standard UV cutoff: an order of magnitude above every physical scale."""
    return 10.0 * max(mass, abs(p0) + 5.0 * dp)


class FieldState:
    """Marker base class for the supported state families."""


@dataclass(frozen=True)
class Vacuum(FieldState):
    pass


@dataclass(eq=False)
class SingleParticle(FieldState):
    """One-quantum state with wavefunction psi(p) sampled on a grid."""

    grid: MomentumGrid
    psi: np.ndarray

    def __post_init__(self):
        self.psi = np.asarray(self.psi, dtype=complex)
        if self.psi.shape != (self.grid.n,):
            raise GridError("psi must be sampled on the grid nodes")

    def discrete_amplitudes(self, normalize: bool = True) -> np.ndarray:
        """Unit-commutator mode amplitudes c_j = sqrt(w_j/2pi) psi_j.

        With normalize=True the returned vector has unit norm, i.e. the state
        is used as a normalized one-particle state regardless of how psi was
        scaled.
        """
        c = np.sqrt(self.grid.measure) * self.psi
        if normalize:
            n = np.linalg.norm(c)
            if n == 0.0:
                raise GridError("zero-norm one-particle state")
            c = c / n
        return c


@dataclass(eq=False)
class MixedParticle(FieldState):
    """Mixed one-particle state as a tabulated momentum density matrix.

    rho holds rho(p_i, p_j) on the grid nodes, Hermitian with unit trace
    under the grid measure (sum_i w_i/2pi rho_ii = 1). Only the arrival-time
    pipeline accepts mixed states; the correlator machinery is pure-state.
    """

    grid: MomentumGrid
    rho: np.ndarray

    def __post_init__(self):
        r = np.asarray(self.rho, dtype=complex)
        if r.shape != (self.grid.n, self.grid.n):
            raise GridError("rho must be an n x n array on the grid")
        if np.max(np.abs(r - r.conj().T)) > 1e-12 * max(1.0, np.max(np.abs(r))):
            raise GridError("rho must be Hermitian")
        tr = float(np.real(np.sum(self.grid.measure * np.diag(r))))
        if abs(tr - 1.0) > 1e-10:
            raise GridError("rho trace under the grid measure is %.3e, not 1" % tr)
        self.rho = r


@dataclass(eq=False)
class TwoParticle(FieldState):
    """Two-quantum state with symmetric amplitude A(p1, p2) on the grid."""

    grid: MomentumGrid
    amp: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.amp, dtype=complex)
        if a.shape != (self.grid.n, self.grid.n):
            raise GridError("amp must be an n x n array on the grid")
        self.amp = 0.5 * (a + a.T)  # project onto the symmetric sector

    def discrete_pair(self, normalize: bool = True) -> np.ndarray:
        """Symmetric mode-pair amplitude B with |state> = sum B_jk b'_j b'_k |0>.

        b'_j are unit-commutator mode creators; B absorbs the grid measure,
        B_jk = (1/2) sqrt(w_j w_k)/(2pi) A_jk. With normalize=True, B is scaled
        so the state has unit norm (<state|state> = 2 sum |B|^2 for symmetric B).
        """
        s = np.sqrt(self.grid.measure)
        b = 0.5 * np.outer(s, s) * self.amp
        if normalize:
            n2 = 2.0 * np.sum(np.abs(b) ** 2)
            if n2 == 0.0:
                raise GridError("zero-norm two-particle state")
            b = b / np.sqrt(n2)
        return b


@dataclass(eq=False)
class Coherent(FieldState):
    """Coherent state with amplitude z(p) on the grid (same measure as psi)."""

    grid: MomentumGrid
    z: np.ndarray

    def __post_init__(self):
        self.z = np.asarray(self.z, dtype=complex)
        if self.z.shape != (self.grid.n,):
            raise GridError("z must be sampled on the grid nodes")

    def discrete_amplitudes(self) -> np.ndarray:
        """Per-mode coherent amplitudes alpha_j = sqrt(w_j/2pi) z_j (not normalized)."""
        return np.sqrt(self.grid.measure) * self.z


def gaussian_packet(
    grid: MomentumGrid, p0: float, sigma_p: float, x0: float = 0.0
) -> SingleParticle:
    """Gaussian wave packet psi(p) = exp(-(p-p0)^2/(4 sigma_p^2)) e^{-i p x0}.

    The phase convention puts the packet's spatial center at x0 at t = 0.
    """
    p = grid.points
    env = np.exp(-((p - p0) ** 2) / (4.0 * sigma_p**2))
    return SingleParticle(grid, env * np.exp(-1j * p * x0))


def product_pair(a: SingleParticle, b: SingleParticle) -> TwoParticle:
    """Symmetrized product of two one-particle wavefunctions."""
    if a.grid is not b.grid:
        raise GridError("both packets must live on the same grid")
    amp = np.outer(a.psi, b.psi)
    return TwoParticle(a.grid, amp + amp.T)
