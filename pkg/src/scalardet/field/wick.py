"""Contour-ordered (in-in) correlation functions by Wick expansion.

The objects computed here are expectation values

    G(x'_1..x'_n ; x_1..x_n)
        = < anti-T[ C(x'_1)..C(x'_n) ]  T[ C(x_1)..C(x_n) ] >

with C = phi (linear coupling) or C = :phi^2: (quadratic), equal numbers of
insertions on the forward (time-ordered) and backward (anti-time-ordered)
branches, and the state one of the supported families.

The whole contour bookkeeping reduces to a single rule: write the operator
string with the backward block on the left sorted by increasing time and the
forward block on the right sorted by decreasing time (stable in the written
order for ties), and contract pairs left-to-right with the plain Wightman
function W(left, right). Partial contractions leave a normal-ordered remainder
whose expectation value is a moment function of the state:

- Vacuum: perfect matchings only.
- Coherent: uncontracted legs take the c-number value chi(x) = <phi(x)>
  (displaced-vacuum Wick theorem).
- One- and two-quantum states: the remainder's expectation is built from the
  one-body density D_ij = <b'_i b_j> and (two-quantum only) the pair moment
  Gamma_{ij,kl} = <b'_i b'_j b_k b_l>, both of which factor through the state
  amplitudes, so every moment evaluation is O(n_modes) with cached columns.

Quadratic insertions contribute two legs at the same point that are forbidden
from contracting with each other (that is what the normal ordering in :phi^2:
means); states outside the Gaussian families raise NonGaussianState for the
quadratic coupling, matching the supported surface.
"""
from __future__ import annotations

import numpy as np

from ..errors import NonGaussianState, UnsupportedOrder
from .types import (
    Coherent,
    FieldState,
    MomentumGrid,
    SingleParticle,
    SpacetimePoint,
    TwoParticle,
    Vacuum,
)

MAX_ORDER = 3


def ordered_insertions(forward, backward):
    """Canonical operator-string order for contour insertions.

    Returns a list of (point, insertion_id) with the backward (anti-time-
    ordered) block first, sorted by increasing time, followed by the forward
    (time-ordered) block sorted by decreasing time. Sorting is stable, so
    equal-time insertions on the same branch keep their written order.
    Insertion ids are unique per original insertion and shared by both legs of
    a quadratic insertion.
    """
    bwd = list(backward)
    fwd = list(forward)
    bt = np.array([p.t for p in bwd], dtype=float)
    ft = np.array([p.t for p in fwd], dtype=float)
    order_b = np.argsort(bt, kind="stable")
    order_f = np.argsort(-ft, kind="stable")
    out = []
    for i in order_b:
        out.append((bwd[i], ("b", int(i))))
    for i in order_f:
        out.append((fwd[i], ("f", int(i))))
    return out


class WickContext:
    """Cached per-point mode data shared across many correlator evaluations.

    Callers evaluating correlators at many point tuples drawn from a modest
    set of distinct points (quadrature nodes) should reuse one context: mode
    columns, Wightman pairs, chi values and state contractions are all
    memoized by point coordinates.
    """

    def __init__(self, grid: MomentumGrid, state: FieldState, eps: float = 0.0):
        self.grid = grid
        self.state = state
        self.eps = float(eps)
        # g_j with W(a,b) = sum_j g_j^2 e_j(a) conj(e_j(b))
        self._g = grid.mode_couplings
        self._w = grid.energies
        self._k = grid.points
        self._cols: dict = {}
        self._wpairs: dict = {}
        self._chi: dict = {}
        self._avals: dict = {}
        self._bcols: dict = {}
        if isinstance(state, SingleParticle):
            self._c = state.discrete_amplitudes()
        elif isinstance(state, TwoParticle):
            self._B = state.discrete_pair()
        elif isinstance(state, Coherent):
            self._alpha = state.discrete_amplitudes()

    @staticmethod
    def _key(p: SpacetimePoint):
        return (p.t, p.x)

    def col(self, p: SpacetimePoint) -> np.ndarray:
        """g_j * e_j(p) with e_j(p) = exp(-i(w_j t - k_j x))."""
        key = self._key(p)
        c = self._cols.get(key)
        if c is None:
            # half the damping per column: W picks up exp(-w*eps) per pair
            damp = self._w * (0.5 * self.eps) if self.eps else 0.0
            phase = -1j * (self._w * p.t - self._k * p.x[0])
            c = self._g * np.exp(phase - damp)
            self._cols[key] = c
        return c

    def wightman(self, pa: SpacetimePoint, pb: SpacetimePoint) -> complex:
        """W(pa, pb) with pa the left operator."""
        key = (self._key(pa), self._key(pb))
        v = self._wpairs.get(key)
        if v is None:
            v = complex(np.vdot(self.col(pb), self.col(pa)))
            self._wpairs[key] = v
        return v

    def chi(self, p: SpacetimePoint) -> float:
        """Coherent-state mean field <z|phi(p)|z> (real)."""
        key = self._key(p)
        v = self._chi.get(key)
        if v is None:
            s = np.sum(self._alpha * self.col(p))
            v = 2.0 * s.real
            self._chi[key] = v
        return v

    # -- fixed-N moment helpers -------------------------------------------

    def _aval(self, p):
        key = self._key(p)
        v = self._avals.get(key)
        if v is None:
            v = complex(np.sum(self._c * self.col(p)))
            self._avals[key] = v
        return v

    def _bcol(self, p):
        key = self._key(p)
        v = self._bcols.get(key)
        if v is None:
            v = self._B @ self.col(p)
            self._bcols[key] = v
        return v

    def moment(self, pts) -> complex:
        """Expectation of the normal-ordered product :phi(p1)..phi(pm): ."""
        m = len(pts)
        if m == 0:
            return 1.0
        if m % 2:
            return 0.0
        if isinstance(self.state, SingleParticle):
            if m != 2:
                return 0.0
            u, v = pts
            return np.conj(self._aval(u)) * self._aval(v) + np.conj(
                self._aval(v)
            ) * self._aval(u)
        if isinstance(self.state, TwoParticle):
            if m == 2:
                u, v = pts
                return 4.0 * (
                    np.vdot(self._bcol(u), self._bcol(v))
                    + np.vdot(self._bcol(v), self._bcol(u))
                )
            if m == 4:
                total = 0.0 + 0.0j
                idx = range(4)
                for a in idx:
                    for b in idx:
                        if b <= a:
                            continue
                        c, d = [i for i in idx if i not in (a, b)]
                        qcre = np.dot(self.col(pts[a]), self._bcol(pts[b]))
                        qann = np.dot(self.col(pts[c]), self._bcol(pts[d]))
                        total += 4.0 * np.conj(qcre) * qann
                return total
            return 0.0
        return 0.0 if m else 1.0


def _max_moment(state: FieldState) -> int:
    if isinstance(state, SingleParticle):
        return 2
    if isinstance(state, TwoParticle):
        return 4
    return 0


def contour_correlator(
    grid: MomentumGrid,
    state: FieldState,
    forward,
    backward,
    coupling: str = "linear",
    eps: float = 0.0,
    context: WickContext | None = None,
) -> complex:
    """Contour-ordered 2n-point function with n insertions per branch.

    Parameters
    ----------
    forward, backward : sequences of SpacetimePoint
        Insertion points on the time-ordered and anti-time-ordered branch;
        must have equal length n <= 3.
    coupling : {"linear", "quadratic"}
        Field monomial inserted at each point, phi or :phi^2:.
    eps : float
        Optional per-mode damping; finite grids need none.
    context : WickContext, optional
        Reusable cache; must match (grid, state, eps) if given.

    Satisfies hermiticity, G(fwd=A, bwd=B) = conj(G(fwd=B, bwd=A)), and for
    n = 1 at coincident arguments returns the (real, non-negative) smeared
    intensity.
    """
    n = len(forward)
    if len(backward) != n:
        raise UnsupportedOrder("need equal numbers of forward and backward insertions")
    if n > MAX_ORDER:
        raise UnsupportedOrder("contour correlators implemented up to n = %d" % MAX_ORDER)
    if coupling not in ("linear", "quadratic"):
        raise ValueError("coupling must be 'linear' or 'quadratic'")
    if coupling == "quadratic" and isinstance(state, (SingleParticle, TwoParticle)):
        raise NonGaussianState(
            "quadratic insertions are supported for Gaussian states only"
        )
    if n == 0:
        return 1.0 + 0.0j
    ctx = context if context is not None else WickContext(grid, state, eps)
    string = ordered_insertions(forward, backward)
    if coupling == "quadratic":
        legs = []
        for (p, iid) in string:
            legs.append((p, iid))
            legs.append((p, iid))
        exclude_same = True
    else:
        legs = string
        exclude_same = False
    allow_chi = isinstance(state, Coherent)
    max_m = _max_moment(state)
    return _expand(ctx, legs, 0, [], exclude_same, allow_chi, max_m)


def _expand(ctx, legs, start, moment_acc, exclude_same, allow_chi, max_m):
    # find first unused leg
    i = start
    n = len(legs)
    while i < n and legs[i] is None:
        i += 1
    if i == n:
        return ctx.moment(moment_acc)
    p_i, id_i = legs[i]
    legs[i] = None
    total = 0.0 + 0.0j
    # contract leg i with a later leg j
    for j in range(i + 1, n):
        if legs[j] is None:
            continue
        p_j, id_j = legs[j]
        if exclude_same and id_j == id_i:
            continue
        legs[j] = None
        w = ctx.wightman(p_i, p_j)
        if w != 0.0:
            total += w * _expand(
                ctx, legs, i + 1, moment_acc, exclude_same, allow_chi, max_m
            )
        legs[j] = (p_j, id_j)
    # leave leg i uncontracted
    if allow_chi:
        total += ctx.chi(p_i) * _expand(
            ctx, legs, i + 1, moment_acc, exclude_same, allow_chi, max_m
        )
    elif len(moment_acc) < max_m:
        moment_acc.append(p_i)
        total += _expand(ctx, legs, i + 1, moment_acc, exclude_same, allow_chi, max_m)
        moment_acc.pop()
    legs[i] = (p_i, id_i)
    return total
