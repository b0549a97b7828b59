"""Two-event densities, outcome sets, and the generating-functional identity."""
import warnings

import numpy as np
import pytest

import oracles
from scalardet.detection import detection_density
from scalardet.detector import GaussianEnergy, MaximalLocalization, kernel_profile
from scalardet.errors import CoarseGridWarning, UnsupportedOrder
from scalardet.field import (
    Coherent,
    Vacuum,
    contour_correlator,
    fock_correlator,
    gaussian_packet,
    momentum_grid,
    point,
    product_pair,
)
from scalardet.field.wick import WickContext
from scalardet.joint import (
    CellPairSource,
    OutcomeSet,
    contour_diagonal_generating,
    event_tables,
    joint_density,
    outcome_generating,
    p_detect,
    rank_one_source,
)


def _tiny_grid(n, p_max, mass):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", CoarseGridWarning)
        return momentum_grid(n, p_max, mass)


G5 = _tiny_grid(5, 3.0, 1.0)
VAC = Vacuum()
SINGLE = gaussian_packet(G5, 1.2, 0.8)
TWO = product_pair(gaussian_packet(G5, 1.2, 0.8), gaussian_packet(G5, -0.9, 0.7))
STATES = [("vacuum", VAC), ("single", SINGLE), ("two", TWO)]

FLAT = MaximalLocalization(1.0)
X1 = point(0.3, -0.4)
X2 = point(1.1, 0.7)

# band-limited kernels whose position profiles decay fast enough for the
# y-quadrature oracle to run on a short window
KERN_A = GaussianEnergy(1.1, 2.4, 0.8, band_mass=2.0)
KERN_B = GaussianEnergy(0.9, 2.2, 0.7, band_mass=2.0)


def _rel(a, b):
    return abs(a - b) / max(abs(b), 1e-300)


@pytest.mark.parametrize("name,state", STATES)
def test_flat_kernel_reduces_to_bare_correlator(name, state):
    jd2 = joint_density(state, [FLAT, FLAT], [X1, X2], grid=G5)
    cc2 = contour_correlator(G5, state, [X1, X2], [X1, X2])
    fc2 = fock_correlator(G5, state, [X1, X2], [X1, X2], occ_cap=4)
    assert _rel(jd2, cc2.real) < 1e-12
    assert _rel(jd2, fc2.real) < 1e-10
    jd1 = joint_density(state, [FLAT], [X1], grid=G5)
    cc1 = contour_correlator(G5, state, [X1], [X1])
    assert _rel(jd1, cc1.real) < 1e-12


def test_single_event_reduces_to_detection_density():
    kern = GaussianEnergy(1.3, 1.5, 0.9, band_mass=1.0)
    want = detection_density(SINGLE, kern, [X1, X2])
    assert _rel(joint_density(SINGLE, [kern], [X1]), want[0]) < 1e-12
    assert _rel(joint_density(SINGLE, [kern], [X2]), want[1]) < 1e-12
    wv = detection_density(VAC, kern, [X1], grid=G5)
    assert _rel(joint_density(VAC, [kern], [X1], grid=G5), wv[0]) < 1e-12


Y_GRID = np.linspace(-12.0, 12.0, 301)


def _real_space_profile(kernel):
    k_hi = kernel.e0 + kernel.band_mass + 14.0 / kernel.tau
    k = np.linspace(0.0, k_hi, 20001)
    return oracles.position_profile(kernel_profile(kernel, k), k, Y_GRID)


def test_position_profile_roundtrip():
    w = np.empty_like(Y_GRID)
    w[1:-1] = 0.5 * (Y_GRID[2:] - Y_GRID[:-2])
    w[0] = w[-1] = 0.5 * (Y_GRID[1] - Y_GRID[0])
    r = _real_space_profile(KERN_A)
    for q in (0.0, 0.7, 1.6, 3.0):
        recovered = float(np.sum(w * r * np.cos(q * Y_GRID)))
        assert _rel(recovered, float(kernel_profile(KERN_A, q))) < 5e-10


@pytest.mark.parametrize("name,state", STATES)
def test_smeared_pair_density_matches_quadrature(name, state):
    jd = joint_density(state, [KERN_A, KERN_B], [X1, X2], grid=G5)
    ctx = WickContext(G5, state)

    def correlator(fw, bw):
        return contour_correlator(
            G5, state,
            [point(*p) for p in fw],
            [point(*p) for p in bw],
            context=ctx,
        )

    want = oracles.smeared_pair_density(
        correlator,
        _real_space_profile(KERN_A),
        _real_space_profile(KERN_B),
        Y_GRID,
        (X1.t, X1.x[0]),
        (X2.t, X2.x[0]),
    )
    assert abs(want.imag) / abs(want.real) < 1e-10
    assert _rel(jd, want.real) < 2e-8


def test_exchange_symmetry():
    fwd = joint_density(TWO, [KERN_A, KERN_B], [X1, X2], grid=G5)
    swp = joint_density(TWO, [KERN_B, KERN_A], [X2, X1], grid=G5)
    assert _rel(swp, fwd) < 1e-12
    same_fwd = joint_density(TWO, [KERN_A, KERN_A], [X1, X2], grid=G5)
    same_swp = joint_density(TWO, [KERN_A, KERN_A], [X2, X1], grid=G5)
    assert _rel(same_swp, same_fwd) < 1e-12


CELLS = OutcomeSet(
    (point(0.2, -0.5), point(0.9, 0.1), point(1.4, 0.8)), np.array([0.3, 0.4, 0.3])
)


def test_generating_functional_identity():
    jsrc = np.array([0.7, -0.4, 1.1])
    for name, state in (("vacuum", VAC), ("single", SINGLE)):
        zq = outcome_generating(jsrc, state, KERN_A, CELLS, grid=G5)
        zc = contour_diagonal_generating(rank_one_source(jsrc, KERN_A), state, CELLS, grid=G5)
        assert _rel(zc, zq) < 1e-10, name


def test_generating_functional_at_zero_source():
    z0 = outcome_generating(np.zeros(3), VAC, KERN_A, CELLS, grid=G5)
    assert z0 == 1.0


def test_functional_derivative_is_first_moment():
    # Z is quadratic in the source, so the central difference is exact
    eta = 1e-3
    ez = np.zeros(3)
    ez[1] = 1.0
    zp = outcome_generating(eta * ez, VAC, KERN_A, CELLS, grid=G5)
    zm = outcome_generating(-eta * ez, VAC, KERN_A, CELLS, grid=G5)
    p1, _ = event_tables(VAC, [KERN_A, KERN_A], CELLS, grid=G5)
    assert abs((zp - zm) / (2.0 * eta) - p1[1] * CELLS.volumes[1]) < 1e-10


def test_diagonal_pair_source_linear_term():
    src = CellPairSource(np.diag([0.0, 1.0, 0.0]), KERN_A)
    z1 = contour_diagonal_generating(src, VAC, CELLS, grid=G5, max_order=1)
    p1, _ = event_tables(VAC, [KERN_A, KERN_A], CELLS, grid=G5)
    assert abs((z1 - 1.0) - p1[1] * CELLS.volumes[1]) < 1e-12


def test_p_detect_is_volume_weighted_marginal():
    p1, _ = event_tables(SINGLE, [KERN_A, KERN_A], CELLS, grid=G5)
    assert _rel(p_detect(SINGLE, KERN_A, CELLS, grid=G5),
                float(np.sum(p1 * CELLS.volumes))) < 1e-14


def test_event_tables_thread_determinism():
    p1a, p2a = event_tables(TWO, [KERN_A, KERN_B], CELLS, grid=G5, threads=1)
    p1b, p2b = event_tables(TWO, [KERN_A, KERN_B], CELLS, grid=G5, threads=4)
    assert np.array_equal(p1a, p1b)
    assert np.array_equal(p2a, p2b)


def test_cluster_factorization_trend():
    grid = momentum_grid(192, 8.0, 1.0)
    kern = GaussianEnergy(1.0, 2.2, 1.2, band_mass=1.0)
    defects = []
    for sep in (8.0, 12.0, 16.0):
        left = gaussian_packet(grid, 2.0, 0.5, x0=-0.5 * sep)
        right = gaussian_packet(grid, -2.0, 0.5, x0=+0.5 * sep)
        state = product_pair(left, right)
        xa, xb = point(0.0, -0.5 * sep), point(0.0, +0.5 * sep)
        p2 = joint_density(state, [kern, kern], [xa, xb])
        p1a = joint_density(state, [kern], [xa])
        p1b = joint_density(state, [kern], [xb])
        defects.append(abs(p2 - p1a * p1b) / p2)
    assert defects[0] > defects[1] > defects[2]
    assert defects[-1] < 1e-3


def test_outcome_set_validation():
    with pytest.raises(Exception):
        OutcomeSet.from_axes(np.array([0.0, 0.7, 1.5]), np.array([-1.0, 0.0, 1.0]))
    with pytest.raises(Exception):
        OutcomeSet((point(0.0, 0.0), point(0.0, 0.0)), np.array([1.0, 1.0]))
    cells = OutcomeSet.from_axes(np.linspace(0.0, 2.0, 3), np.linspace(-1.0, 1.0, 5))
    assert cells.n_cells == 15
    assert np.allclose(cells.volumes, 1.0 * 0.5)


def test_order_and_state_guards():
    with pytest.raises(UnsupportedOrder):
        joint_density(VAC, [FLAT] * 3, [X1, X2, point(2.0, 0.0)], grid=G5)
    with pytest.raises(UnsupportedOrder):
        joint_density(VAC, [FLAT], [X1], grid=G5, coupling="quadratic")
    with pytest.raises(TypeError):
        joint_density(Coherent(G5, np.full(5, 0.2 + 0.1j)), [FLAT], [X1])
    with pytest.raises(UnsupportedOrder):
        outcome_generating(np.zeros(3), VAC, KERN_A, CELLS, grid=G5, max_order=3)
