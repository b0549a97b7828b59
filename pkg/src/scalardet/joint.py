"""Two-event joint densities and outcome generating functionals.

The n-event density contracts the 2n-point contour correlator with one
response kernel per event,

    P(X_1 .. X_n) = int prod_i d^{d+1}y_i R_i(y_i)
                    G(X_1 + y_1/2, ..., X_n + y_n/2 ; X_1 - y_1/2, ...),

backward-branch points listed first, exactly as in the single-event master
formula. For the time-pointlike kernel families the smearing integrals
collapse in momentum space: write every Wick factor of G as a mode sum, so
each of the 2n legs carries a definite mode phase e_j or its conjugate; a leg
at X +- y/2 then contributes a half-momentum flow +-k_j/2 to its detector's
spatial smear, and the y_i integral turns into the kernel profile evaluated
at the magnitude of the two flows meeting at detector i. The flow signs
follow the contour order (backward block by increasing center time, forward
block by decreasing, ties keeping the written order), so each contraction is
a small tensor network over mode indices: profile matrices at half-sum or
half-difference arguments sandwiched between mode-colored state weights.
Everything here reduces at n = 1 to `detection_density`, whose conventions
(both moment pairings kept, profile at the on-shell momentum average) are
inherited wholesale.

Supported states are the fixed-quantum families (vacuum, one- and
two-quantum); coherent pulses have their own expansion in `scalardet.limits`.
Event counts are capped at two: the contraction rule is order-generic, but
each extra event doubles the legs and the oracle cost, and nothing above
n = 2 is validated.

Outcome sets discretize the detection record into spacetime cells with
quadrature volumes. The complement outcome (no detection anywhere) carries
no density of its own; tables stay raw, and `p_detect` integrates the
single-event density over the cells so callers can condition explicitly.
Joint conditioning across two detectors has no single natural rule and is
deliberately left to the caller.

Equal-time caveat: the contour order of two insertions at exactly equal
center times is conventional (the written order is kept); joint tables whose
cells straddle equal times inherit that convention. Distinct cell times are
unambiguous.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._num import chunk_ranges, run_chunked
from .detector import DetectorKernel, kernel_profile
from .errors import NegativeDensity, ScalardetError, UnsupportedOrder
from .field.types import (
    MomentumGrid,
    SingleParticle,
    SpacetimePoint,
    TwoParticle,
    Vacuum,
)

__all__ = [
    "OutcomeSet",
    "CellPairSource",
    "joint_density",
    "event_tables",
    "p_detect",
    "outcome_generating",
    "rank_one_source",
    "contour_diagonal_generating",
]

IMAG_TOL = 1e-10
NEGATIVITY_FLOOR = -1e-8

MAX_EVENTS = 2


class _EventWorkspace:
    """Mode-space caches shared by many smeared-contraction evaluations.

    Holds the grid columns g_j e_j(p), the state's contraction weights, and
    the per-kernel profile matrices at half-sum / half-difference momentum
    arguments. Outcome tables evaluate thousands of contractions over a
    modest set of distinct points and kernels; everything point- or
    kernel-shaped is prepared once.
    """

    def __init__(self, grid: MomentumGrid, state):
        self.grid = grid
        self.state = state
        k = grid.points
        self._g = grid.mode_couplings
        self._w = grid.energies
        self._k = k
        self.half_sum = 0.5 * np.abs(k[:, None] + k[None, :])
        self.half_diff = 0.5 * np.abs(k[:, None] - k[None, :])
        self._cols: dict = {}
        self._profs: dict = {}
        if isinstance(state, SingleParticle):
            self._c = state.discrete_amplitudes()
        elif isinstance(state, TwoParticle):
            b = state.discrete_pair()
            self._B = b
            self._H = np.conj(b).T @ b

    def col(self, p: SpacetimePoint) -> np.ndarray:
        key = (p.t, p.x)
        v = self._cols.get(key)
        if v is None:
            v = self._g * np.exp(-1j * (self._w * p.t - self._k * p.x[0]))
            self._cols[key] = v
        return v

    def svec(self, p: SpacetimePoint) -> np.ndarray:
        """One-quantum removal amplitude c_j g_j e_j(p)."""
        return self._c * self.col(p)

    def prof(self, kernel: DetectorKernel, kind: str) -> np.ndarray:
        key = (id(kernel), kind)
        m = self._profs.get(key)
        if m is None:
            arg = self.half_sum if kind == "sum" else self.half_diff
            m = kernel_profile(kernel, arg)
            self._profs[key] = m
        return m


def _string_order(insertions):
    """Canonical leg order for the contour product.

    insertions: list of (backward point, forward point, kernel) per event.
    Returns legs as (branch, event) with the backward block sorted by
    increasing center time, then the forward block by decreasing time;
    sorting is stable, so equal times keep the written order.
    """
    n = len(insertions)
    bwd = sorted(range(n), key=lambda i: insertions[i][0].t)
    fwd = sorted(range(n), key=lambda i: -insertions[i][1].t)
    return [("b", i) for i in bwd] + [("f", i) for i in fwd]


def _wick_terms(legs, state):
    """Enumerate the contour Wick expansion as (scale, atoms) pairs.

    Atoms name the factor structure; `_contract_term` turns them into an
    einsum. Kinds:

      ("W", a, b)            Wightman pair, a the string-left (conjugate) leg;
                             one shared mode index.
      ("CRE1", a)/("ANN1", b) one-quantum moment legs, conj(c g e) / c g e.
      ("H2", a, b)           two-quantum 2-moment orientation: 4 col(a)+ H col(b)
                             with H = B+ B; independent indices on a and b.
      ("B4", (a, b), (c, d)) two-quantum 4-moment: 4 conj(B-pair on a,b) x
                             (B-pair on c,d).
    """
    m = len(legs)
    terms = []
    if m == 2:
        a, b = legs
        terms.append((1.0, [("W", a, b)]))
        if isinstance(state, SingleParticle):
            terms.append((1.0, [("CRE1", a), ("ANN1", b)]))
            terms.append((1.0, [("CRE1", b), ("ANN1", a)]))
        elif isinstance(state, TwoParticle):
            terms.append((4.0, [("H2", a, b)]))
            terms.append((4.0, [("H2", b, a)]))
        return terms
    # m == 4: full pairings first (the string order is already canonical, so
    # every matching contracts left-to-right)
    idx = range(4)
    matchings = [((0, 1), (2, 3)), ((0, 2), (1, 3)), ((0, 3), (1, 2))]
    for (a, b), (c, d) in matchings:
        terms.append((1.0, [("W", legs[a], legs[b]), ("W", legs[c], legs[d])]))
    if isinstance(state, (SingleParticle, TwoParticle)):
        for a in idx:
            for b in idx:
                if b <= a:
                    continue
                c, d = [i for i in idx if i not in (a, b)]
                w_atom = ("W", legs[a], legs[b])
                u, v = legs[c], legs[d]
                if isinstance(state, SingleParticle):
                    terms.append((1.0, [w_atom, ("CRE1", u), ("ANN1", v)]))
                    terms.append((1.0, [w_atom, ("CRE1", v), ("ANN1", u)]))
                else:
                    terms.append((4.0, [w_atom, ("H2", u, v)]))
                    terms.append((4.0, [w_atom, ("H2", v, u)]))
    if isinstance(state, TwoParticle):
        for a in idx:
            for b in idx:
                if b <= a:
                    continue
                c, d = [i for i in idx if i not in (a, b)]
                terms.append(
                    (4.0, [("B4", (legs[a], legs[b]), (legs[c], legs[d]))])
                )
    return terms


def _contract_term(ws: _EventWorkspace, insertions, scale, atoms) -> complex:
    """Evaluate one Wick term as a mode-index tensor network.

    Each leg gets a mode index and a flow sign eps*s (eps = +1 for a direct
    mode phase, -1 for a conjugate; s = +1 backward, -1 forward). The kernel
    profile of event i couples its two legs at the half-sum argument when
    the flows agree and half-difference when they oppose.
    """
    letters = iter("abcdefgh")
    ops = []
    subs = []
    leg_idx: dict = {}
    leg_flow: dict = {}

    def place(leg, point_vec, eps, letter):
        leg_idx[leg] = letter
        leg_flow[leg] = eps * (1 if leg[0] == "b" else -1)
        ops.append(point_vec)
        subs.append(letter)

    def X(leg):
        b_pt, f_pt, _ = insertions[leg[1]]
        return b_pt if leg[0] == "b" else f_pt

    for atom in atoms:
        kind = atom[0]
        if kind == "W":
            _, a, b = atom
            ell = next(letters)
            # one operand carrying both legs' shared index
            ops.append(np.conj(ws.col(X(a))) * ws.col(X(b)))
            subs.append(ell)
            leg_idx[a] = ell
            leg_idx[b] = ell
            leg_flow[a] = -(1 if a[0] == "b" else -1)
            leg_flow[b] = +(1 if b[0] == "b" else -1)
        elif kind == "CRE1":
            place(atom[1], np.conj(ws.svec(X(atom[1]))), -1, next(letters))
        elif kind == "ANN1":
            place(atom[1], ws.svec(X(atom[1])), +1, next(letters))
        elif kind == "H2":
            _, a, b = atom
            la, lb = next(letters), next(letters)
            place(a, np.conj(ws.col(X(a))), -1, la)
            ops.append(ws._H)
            subs.append(la + lb)
            place(b, ws.col(X(b)), +1, lb)
        elif kind == "B4":
            _, (a, b), (c, d) = atom
            la, lb, lc, ld = (next(letters) for _ in range(4))
            place(a, np.conj(ws.col(X(a))), -1, la)
            place(b, np.conj(ws.col(X(b))), -1, lb)
            ops.append(np.conj(ws._B))
            subs.append(la + lb)
            place(c, ws.col(X(c)), +1, lc)
            place(d, ws.col(X(d)), +1, ld)
            ops.append(ws._B)
            subs.append(lc + ld)
        else:  # pragma: no cover - enumeration and contraction move together
            raise ScalardetError("unknown contraction atom %r" % (kind,))

    # one profile matrix per event, coupling the modes of its two legs
    by_event: dict = {}
    for leg in leg_idx:
        by_event.setdefault(leg[1], []).append(leg)
    for event, pair in by_event.items():
        la, lb = pair
        kind = "sum" if leg_flow[la] == leg_flow[lb] else "diff"
        kernel = insertions[event][2]
        ops.append(ws.prof(kernel, kind))
        subs.append(leg_idx[la] + leg_idx[lb])

    return scale * complex(np.einsum(",".join(subs) + "->", *ops, optimize=True))


def _smeared_contraction(ws: _EventWorkspace, insertions) -> complex:
    legs = _string_order(insertions)
    total = 0.0 + 0.0j
    for scale, atoms in _wick_terms(legs, ws.state):
        total += _contract_term(ws, insertions, scale, atoms)
    return total


def _resolve_grid(state, grid):
    if isinstance(state, Vacuum):
        if grid is None:
            raise ValueError("vacuum joint densities need an explicit momentum grid")
        return grid
    if isinstance(state, (SingleParticle, TwoParticle)):
        return state.grid
    raise TypeError(
        "joint densities support vacuum and fixed-quantum states; "
        "coherent pulses go through the photodetection expansion "
        "(unsupported state family: %r)" % (state,)
    )


def _check_real(value: complex, where: str) -> float:
    scale = max(1.0, abs(value.real))
    if abs(value.imag) > IMAG_TOL * scale:
        raise ScalardetError(
            "imaginary residue %.3e in %s exceeds tolerance" % (value.imag, where)
        )
    return value.real


def joint_density(
    state,
    kernels,
    xs,
    grid: MomentumGrid | None = None,
    coupling: str = "linear",
    workspace: _EventWorkspace | None = None,
) -> float:
    """Joint detection density for one or two events.

    Parameters
    ----------
    state : Vacuum, SingleParticle, or TwoParticle
    kernels : sequence of DetectorKernel, one per event (n <= 2)
    xs : sequence of SpacetimePoint, the event cell centers
    grid : MomentumGrid, required for the vacuum (particle states carry one)
    coupling : {"linear"}
        The quadratic-coupling contraction (eight legs at n = 2) is not
        implemented; requesting it raises UnsupportedOrder.
    workspace : optional cache from a previous call with the same state/grid

    Returns the raw (unconditioned, unnormalized) density. At n = 1 this is
    the same contraction `detection_density` performs, including the vacuum
    floor. Densities are allowed to graze zero from below by rounding; a
    value below -1e-8 (relative to its own scale) raises NegativeDensity.
    """
    n = len(kernels)
    if len(xs) != n:
        raise ValueError("need one cell center per kernel")
    if not 1 <= n <= MAX_EVENTS:
        raise UnsupportedOrder("joint densities implemented for 1 or 2 events")
    if coupling != "linear":
        raise UnsupportedOrder(
            "only the linear coupling is implemented for joint densities"
        )
    g = _resolve_grid(state, grid)
    ws = workspace if workspace is not None else _EventWorkspace(g, state)
    insertions = [(x, x, kern) for x, kern in zip(xs, kernels)]
    value = _check_real(_smeared_contraction(ws, insertions), "joint_density")
    if value < NEGATIVITY_FLOOR * max(1.0, abs(value)):
        raise NegativeDensity(
            "joint density %.3e is negative beyond the rounding floor" % value
        )
    return value


@dataclass(frozen=True, eq=False)
class OutcomeSet:
    """Discretized outcome cells: spacetime centers with quadrature volumes.

    The no-detection outcome is the implicit complement and carries no cell;
    integrate a density against `volumes` (or call `p_detect`) to condition
    explicitly.
    """

    centers: tuple
    volumes: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "centers", tuple(self.centers))
        object.__setattr__(
            self, "volumes", np.asarray(self.volumes, dtype=float).reshape(-1)
        )
        if len(self.centers) != self.volumes.size:
            raise ValueError("need one volume per cell center")
        if self.volumes.size == 0:
            raise ValueError("outcome set needs at least one cell")
        if np.any(self.volumes <= 0.0):
            raise ValueError("cell volumes must be positive")
        seen = set()
        for p in self.centers:
            key = (p.t, p.x)
            if key in seen:
                raise ValueError("outcome cells must be disjoint (duplicate center)")
            seen.add(key)

    @property
    def n_cells(self) -> int:
        return len(self.centers)

    @classmethod
    def from_axes(cls, t_axis, x_axis) -> "OutcomeSet":
        """Rectangular cells from uniform time and position axes."""
        t_axis = np.asarray(t_axis, dtype=float)
        x_axis = np.asarray(x_axis, dtype=float)
        for ax in (t_axis, x_axis):
            if ax.size > 1:
                steps = np.diff(ax)
                if not np.allclose(steps, steps[0], rtol=1e-12, atol=0.0):
                    raise ValueError("cell axes must be uniformly spaced")
        dt = float(t_axis[1] - t_axis[0]) if t_axis.size > 1 else 1.0
        dx = float(x_axis[1] - x_axis[0]) if x_axis.size > 1 else 1.0
        centers = [
            SpacetimePoint(float(t), (float(x),)) for t in t_axis for x in x_axis
        ]
        return cls(centers, np.full(len(centers), dt * dx))


def event_tables(
    state,
    kernels,
    outcomes: OutcomeSet,
    grid: MomentumGrid | None = None,
    threads: int = 1,
):
    """Single- and two-event densities over an outcome set.

    Returns (P1, P2): P1[a] is the first kernel's density at cell a, and
    P2[a, b] the two-event density with the first detector at cell a and the
    second at cell b. Cell pairs are contracted in chunks whose layout
    depends only on the table size, with a fixed reduction order, so the
    result is independent of `threads`.
    """
    if not 1 <= len(kernels) <= MAX_EVENTS:
        raise UnsupportedOrder("event tables implemented for 1 or 2 kernels")
    g = _resolve_grid(state, grid)
    ws = _EventWorkspace(g, state)
    centers = outcomes.centers
    n_cells = outcomes.n_cells
    p1 = np.array(
        [joint_density(state, kernels[:1], [c], grid=g, workspace=ws) for c in centers]
    )
    if len(kernels) == 1:
        return p1, None
    pairs = [(a, b) for a in range(n_cells) for b in range(n_cells)]

    def worker(rng):
        lo, hi = rng
        return [
            joint_density(
                state,
                kernels,
                [centers[a], centers[b]],
                grid=g,
                workspace=ws,
            )
            for a, b in pairs[lo:hi]
        ]

    parts = run_chunked(worker, chunk_ranges(len(pairs), 64), threads)
    flat = [v for part in parts for v in part]
    p2 = np.array(flat).reshape(n_cells, n_cells)
    return p1, p2


def p_detect(state, kernel, outcomes: OutcomeSet, grid: MomentumGrid | None = None) -> float:
    """Total single-event probability over the outcome cells."""
    p1, _ = event_tables(state, [kernel], outcomes, grid=grid)
    return float(np.sum(outcomes.volumes * p1))


def outcome_generating(
    j,
    state,
    kernel: DetectorKernel,
    outcomes: OutcomeSet,
    grid: MomentumGrid | None = None,
    max_order: int = 2,
) -> float:
    """Moment generating functional of the outcome densities, truncated.

    Z[j] = sum_{n <= max_order} (1/n!) sum_{cells} P_n(z_1..z_n)
           j(z_1)..j(z_n) vol(z_1)..vol(z_n),

    with every event read out by the same kernel. The empty product makes
    Z[0] = 1 exactly.
    """
    if not 0 <= max_order <= MAX_EVENTS:
        raise UnsupportedOrder("generating functional truncates at order 2")
    j = np.asarray(j, dtype=float).reshape(-1)
    if j.size != outcomes.n_cells:
        raise ValueError("need one source value per outcome cell")
    total = 1.0
    if max_order == 0:
        return total
    kernels = [kernel, kernel][: max(1, max_order)]
    p1, p2 = event_tables(state, kernels[:2] if max_order >= 2 else kernels, outcomes, grid=grid)
    jv = j * outcomes.volumes
    total += float(np.sum(jv * p1))
    if max_order >= 2:
        total += 0.5 * float(jv @ p2 @ jv)
    return total


@dataclass(frozen=True, eq=False)
class CellPairSource:
    """Source on ordered cell pairs for the diagonal contour functional.

    weights[a, b] couples a backward-branch insertion at cell a to a
    forward-branch insertion at cell b, smeared by `kernel`; cells enter
    with sqrt(vol_a vol_b), so a diagonal source reproduces the per-cell
    quadrature of the outcome functional.
    """

    weights: np.ndarray
    kernel: DetectorKernel

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        if w.ndim != 2 or w.shape[0] != w.shape[1]:
            raise ValueError("pair-source weights must be a square matrix")
        object.__setattr__(self, "weights", w)


def rank_one_source(j, kernel: DetectorKernel) -> CellPairSource:
    """Diagonal pair source carrying a per-cell scalar source."""
    j = np.asarray(j, dtype=float).reshape(-1)
    return CellPairSource(np.diag(j), kernel)


def contour_diagonal_generating(
    source: CellPairSource,
    state,
    outcomes: OutcomeSet,
    grid: MomentumGrid | None = None,
    max_order: int = 2,
) -> float:
    """Generating functional of balanced correlators against a pair source.

    Z[L] = sum_{n <= max_order} (1/n!) sum over n cell pairs (a_i, b_i) of
    prod_i L[a_i, b_i] sqrt(vol_a_i vol_b_i) times the smeared contraction
    with backward legs at the a-centers and forward legs at the b-centers.
    For a diagonal source L = diag(j) this is term by term the outcome
    functional with source j — the two assemblies reach that identity
    through different contraction paths (per-cell densities here, a general
    pair tensor there), which is what the cross-check tests exercise.
    """
    if not 0 <= max_order <= MAX_EVENTS:
        raise UnsupportedOrder("contour functional truncates at order 2")
    lam = source.weights
    if lam.shape[0] != outcomes.n_cells:
        raise ValueError("pair-source weights must match the outcome set")
    total = 1.0 + 0.0j
    if max_order == 0:
        return float(total.real)
    g = _resolve_grid(state, grid)
    ws = _EventWorkspace(g, state)
    root_v = np.sqrt(outcomes.volumes)
    scaled = lam * np.outer(root_v, root_v)
    rows, cols = np.nonzero(scaled)
    pairs = list(zip(rows.tolist(), cols.tolist()))
    for a, b in pairs:
        ins = [(outcomes.centers[a], outcomes.centers[b], source.kernel)]
        total += scaled[a, b] * _smeared_contraction(ws, ins)
    if max_order >= 2:
        for a, b in pairs:
            for c, d in pairs:
                ins = [
                    (outcomes.centers[a], outcomes.centers[b], source.kernel),
                    (outcomes.centers[c], outcomes.centers[d], source.kernel),
                ]
                total += (
                    0.5
                    * scaled[a, b]
                    * scaled[c, d]
                    * _smeared_contraction(ws, ins)
                )
    return _check_real(total, "contour generating functional")
