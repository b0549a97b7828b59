"""Exact-diagonalization oracle on a truncated Fock space.

Independent cross-check for the Wick-expansion correlators: the field is
built from the same discretized modes, but operators act literally on state
vectors of the truncated many-body space (per-mode occupation cap), and
contour ordering is realized by multiplying operators in the canonically
ordered string. No pairing combinatorics anywhere.

The comparison is exact (up to rounding) as long as the occupation cap is
high enough that no amplitude is truncated away: starting from an N-quantum
state, a 2n-point function explores at most N + n quanta per mode overall, so
cap >= N + n is always sufficient.

Matrix-free: phi(x) is applied mode by mode through strided ladder actions,
so the only dense object is the state vector (dimension capped at 4096).
"""
from __future__ import annotations

import numpy as np

from ..errors import DimensionOverflow
from .types import (
    Coherent,
    MomentumGrid,
    SingleParticle,
    SpacetimePoint,
    TwoParticle,
    Vacuum,
)
from .wick import ordered_insertions

DIM_CAP = 4096


class FockSpace:
    """Truncated bosonic Fock space over the modes of a momentum grid."""

    def __init__(self, grid: MomentumGrid, occ_cap: int = 2):
        if occ_cap < 1:
            raise ValueError("occupation cap must be at least 1")
        self.grid = grid
        self.cap = int(occ_cap)
        self.n_modes = grid.n
        dim = (self.cap + 1) ** self.n_modes
        if dim > DIM_CAP:
            raise DimensionOverflow(
                "truncated Fock dimension %d exceeds the %d cap" % (dim, DIM_CAP)
            )
        self.dim = dim
        self.shape = (self.cap + 1,) * self.n_modes
        self._g = grid.mode_couplings
        self._sq = np.sqrt(np.arange(1, self.cap + 1))

    # -- ladder actions ----------------------------------------------------

    def _reshaped(self, vec, j):
        pre = (self.cap + 1) ** j
        post = (self.cap + 1) ** (self.n_modes - j - 1)
        return vec.reshape(pre, self.cap + 1, post)

    def lower(self, vec, j):
        """Annihilation on mode j (unit commutator)."""
        v = self._reshaped(vec, j)
        out = np.zeros_like(v)
        out[:, :-1, :] = self._sq[:, None] * v[:, 1:, :]
        return out.reshape(-1)

    def raise_(self, vec, j):
        """Creation on mode j; amplitude above the cap is dropped."""
        v = self._reshaped(vec, j)
        out = np.zeros_like(v)
        out[:, 1:, :] = self._sq[:, None] * v[:, :-1, :]
        return out.reshape(-1)

    def apply_phi(self, vec, p: SpacetimePoint):
        w = self.grid.energies
        k = self.grid.points
        phase = np.exp(-1j * (w * p.t - k * p.x[0]))
        out = np.zeros_like(vec)
        for j in range(self.n_modes):
            gj = self._g[j]
            if gj == 0.0:
                continue
            out += gj * phase[j] * self.lower(vec, j)
            out += gj * np.conj(phase[j]) * self.raise_(vec, j)
        return out

    def apply_phi2_normal(self, vec, p: SpacetimePoint):
        """Apply :phi^2:(p) = phi(p)^2 - <0|phi^2|0> (exact on the truncation)."""
        c0 = float(np.sum(self._g**2))
        return self.apply_phi(self.apply_phi(vec, p), p) - c0 * vec

    # -- state vectors -----------------------------------------------------

    def vacuum_vector(self):
        v = np.zeros(self.dim, dtype=complex)
        v[0] = 1.0
        return v

    def state_vector(self, state):
        if isinstance(state, Vacuum):
            return self.vacuum_vector()
        if isinstance(state, SingleParticle):
            c = state.discrete_amplitudes()
            v = np.zeros(self.dim, dtype=complex)
            for j in range(self.n_modes):
                if c[j] != 0.0:
                    v += c[j] * self.raise_(self.vacuum_vector(), j)
            return v
        if isinstance(state, TwoParticle):
            b = state.discrete_pair()
            vac = self.vacuum_vector()
            v = np.zeros(self.dim, dtype=complex)
            for j in range(self.n_modes):
                col = self.raise_(vac, j)
                for k in range(self.n_modes):
                    if b[j, k] != 0.0:
                        v += b[j, k] * self.raise_(col, k)
            return v
        if isinstance(state, Coherent):
            # product of per-mode truncated coherent vectors; accurate only
            # while per-mode |alpha|^(cap+1)/sqrt((cap+1)!) is negligible
            alpha = state.discrete_amplitudes()
            v = np.ones(1, dtype=complex)
            occ = np.arange(self.cap + 1)
            fact = np.sqrt(
                np.cumprod(np.concatenate(([1.0], np.arange(1, self.cap + 1))))
            )
            for j in range(self.n_modes):
                mode = alpha[j] ** occ / fact
                mode = mode / np.linalg.norm(mode)
                v = np.kron(v, mode)
            return v
        raise TypeError("unsupported state family: %r" % (state,))


def fock_correlator(
    grid: MomentumGrid,
    state,
    forward,
    backward,
    coupling: str = "linear",
    occ_cap: int = 2,
) -> complex:
    """Contour-ordered correlator by literal operator application.

    Same contract as the Wick-expansion path (equal forward/backward counts,
    canonical string order), evaluated as <Psi| O_1 O_2 ... O_m |Psi> on the
    truncated space.
    """
    space = FockSpace(grid, occ_cap=occ_cap)
    psi = space.state_vector(state)
    string = ordered_insertions(forward, backward)
    vec = psi.copy()
    for p, _ in reversed(string):
        if coupling == "quadratic":
            vec = space.apply_phi2_normal(vec, p)
        else:
            vec = space.apply_phi(vec, p)
    return complex(np.vdot(psi, vec))
