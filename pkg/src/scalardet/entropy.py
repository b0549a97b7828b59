"""Classicality and information measures on detection probability hierarchies.

A pair of detection densities (single-event P1 over an outcome set, two-event
P2 over ordered pairs of cells) is summarized by three numbers:

* ``kolmogorov_defect`` (S_Q): how far P2's marginal is from P1 in L1 —
  the failure of the two-step statistics to be consistent with a classical
  stochastic process whose one-step law is P1.  Zero for any classically
  constructed pair; generically nonzero for interfering configurations.
* ``correlation_entropy`` (S_C): the relative entropy of P2 against the
  product P1 x P1 — mutual-information-like when S_Q vanishes, reported
  without a sign guarantee otherwise.
* ``boltzmann_entropy`` (S_B): the Shannon entropy of a normalized
  single-detection distribution over declared phase-space cells.

All reductions are plain deterministic numpy sums; nothing here depends on
cell labeling order beyond the obvious pairing of weights with values.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .detection import _clamp_negative
from .errors import SupportMismatch

# Marginal weight above which a zero-P1 cell is an inconsistency rather than
# a benign dead cell.
SUPPORT_FLOOR = 1e-12


@dataclass(frozen=True)
class Hierarchy:
    """Single- and two-event densities over one outcome set.

    p1 has shape (n,), p2 shape (n, n) with the first axis the first event,
    and volumes are the quadrature weights (cell measures) of the n cells.
    Small negative values from roundoff are clamped to zero on construction;
    negativity beyond the shared floor raises NegativeDensity.
    """

    p1: np.ndarray
    p2: np.ndarray
    volumes: np.ndarray
    clamp_mass: float = field(default=0.0, compare=False)

    def __post_init__(self):
        p1 = np.asarray(self.p1, dtype=float)
        p2 = np.asarray(self.p2, dtype=float)
        vol = np.asarray(self.volumes, dtype=float)
        n = p1.shape[0]
        if p1.shape != (n,) or p2.shape != (n, n) or vol.shape != (n,):
            raise ValueError(
                "hierarchy shapes inconsistent: p1 %r, p2 %r, volumes %r"
                % (p1.shape, p2.shape, vol.shape)
            )
        if np.any(vol <= 0.0):
            raise ValueError("cell volumes must be positive")
        p1, m1 = _clamp_negative(p1, "hierarchy p1")
        p2, m2 = _clamp_negative(p2, "hierarchy p2")
        object.__setattr__(self, "p1", p1)
        object.__setattr__(self, "p2", p2)
        object.__setattr__(self, "volumes", vol)
        object.__setattr__(self, "clamp_mass", float(m1 + m2))

    @property
    def n_cells(self) -> int:
        return self.p1.shape[0]


def hierarchy_from_events(state, kernels, outcomes, grid=None, threads: int = 1) -> Hierarchy:
    """Build a Hierarchy from the two-event tables of a detector pair."""
    from .joint import event_tables  # local import keeps entropy importable alone

    p1, p2 = event_tables(state, kernels, outcomes, grid=grid, threads=threads)
    return Hierarchy(p1, p2, outcomes.volumes)


def kolmogorov_defect(h: Hierarchy) -> float:
    """L1 distance between the first-event marginal of P2 and P1.

    S_Q = sum_j vol_j | sum_i vol_i P2[i, j] - P1[j] |, i.e. the second-event
    distribution after summing out the first event is compared against the
    single-event law.  Nonnegative by construction.
    """
    marginal = h.volumes @ h.p2
    return float(np.sum(h.volumes * np.abs(marginal - h.p1)))


def _correlation_terms(h: Hierarchy):
    """Shared worker: (S_C value, sorted excluded cell indices).

    Cells with P1 = 0 are excluded from the relative-entropy sum; if any such
    cell still carries P2-marginal weight above SUPPORT_FLOOR the hierarchy's
    support is genuinely inconsistent and SupportMismatch is raised instead.
    """
    v = h.volumes
    dead = h.p1 == 0.0
    if np.any(dead):
        row = v @ h.p2
        col = h.p2 @ v
        bad = dead & ((row > SUPPORT_FLOOR) | (col > SUPPORT_FLOOR))
        if np.any(bad):
            cells = np.nonzero(bad)[0]
            raise SupportMismatch(
                "two-event weight on cells with zero single-event density: %s"
                % cells.tolist(),
                cells=cells,
            )
    keep = ~dead
    pair_keep = np.outer(keep, keep)
    prod = np.outer(h.p1, h.p1)
    mask = pair_keep & (h.p2 > 0.0)
    terms = np.zeros_like(h.p2)
    terms[mask] = h.p2[mask] * np.log(h.p2[mask] / prod[mask])
    value = float(np.einsum("i,j,ij->", v, v, terms))
    return value, np.nonzero(dead)[0].tolist()


def correlation_entropy(h: Hierarchy) -> float:
    """Relative entropy of P2 against the product P1 x P1.

    S_C = sum_ij vol_i vol_j P2 ln(P2 / (P1_i P1_j)) with 0 ln 0 = 0.
    Zero-P1 cells are dropped from the sum (they contribute no weight);
    SupportMismatch is raised if P2 puts real weight on such a cell.
    """
    value, _ = _correlation_terms(h)
    return value


def boltzmann_entropy(p, volumes) -> float:
    """Shannon entropy -sum P ln P * cellvolume of a normalized distribution.

    p and volumes may have any common shape (e.g. an (n_x, n_k) phase-space
    table with per-cell measures); both are flattened.  The 0 ln 0 = 0
    convention applies, and the caller is responsible for normalization
    sum(p * volumes) = 1.
    """
    p = np.asarray(p, dtype=float).ravel()
    v = np.asarray(volumes, dtype=float).ravel()
    if p.shape != v.shape:
        if v.size == 1:
            v = np.full_like(p, float(v[0]))
        else:
            raise ValueError("p and volumes shapes do not match")
    p, _ = _clamp_negative(p, "boltzmann_entropy")
    mask = p > 0.0
    return float(-np.sum(p[mask] * np.log(p[mask]) * v[mask])) + 0.0


def energy_binned_density(
    state, x_points, bin_centers, tau: float, amp: float = 1.0,
    band_mass: float = 0.0, grid=None, sampling=None,
):
    """Operational phase-space table: density per (position, energy-bin) cell.

    Sweeps a Gaussian energy-band kernel of width 1/tau across bin_centers and
    evaluates the single-detection density at each point of x_points, giving
    an (n_x, n_bins) table.  Normalization (and the choice of cell measures)
    is left to the caller.
    """
    from .detection import detection_density
    from .detector import GaussianEnergy

    out = np.empty((len(x_points), len(bin_centers)))
    for j, e0 in enumerate(bin_centers):
        kern = GaussianEnergy(amp, float(e0), tau, band_mass=band_mass)
        out[:, j] = detection_density(state, kern, x_points, grid=grid, sampling=sampling)
    return out


def entropy_report(h: Hierarchy, phase_density=None, phase_volumes=None) -> dict:
    """All three measures as a plain JSON-ready dict.

    S_B is null unless a phase-space distribution is supplied alongside the
    hierarchy.  excluded_cells lists zero-P1 cells dropped from S_C.
    """
    s_c, excluded = _correlation_terms(h)
    s_b = None
    if phase_density is not None:
        if phase_volumes is None:
            phase_volumes = np.ones(1)
        s_b = boltzmann_entropy(phase_density, phase_volumes)
    return {
        "S_Q": kolmogorov_defect(h),
        "S_B": s_b,
        "S_C": s_c,
        "excluded_cells": [int(c) for c in excluded],
    }
