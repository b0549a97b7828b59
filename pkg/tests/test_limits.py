"""Worldline detector response and the photodetection regime.

The windowed responses are checked against a contour-shifted time-domain
quadrature of the closed-form two-point functions (tests/oracles.py), which
shares nothing with the library's frequency-domain route.
"""
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from scalardet.detection import vacuum_rate, vacuum_rate_spherical
from scalardet.detector import GaussianEnergy, MaximalLocalization, SamplingFunctions
from scalardet.errors import (
    NonStationaryConfiguration,
    QuadratureDivergence,
    ScaleSeparationWarning,
)
from scalardet.field import Vacuum, momentum_grid
from scalardet.field.wightman import Thermal
from scalardet.limits import (
    CoherentPulse,
    Inertial,
    UniformAcceleration,
    glauber_point_limit,
    glauber_profile,
    glauber_terms,
    rwa_density,
    udw_response,
)

TWO_PI = 2.0 * np.pi
REST = Inertial()
VAC = Vacuum()

# the pulse every photodetection check rides on: ten spectral widths between
# the carrier and the infrared, kernel flat across the pulse band
PULSE = CoherentPulse(1.0, (1.0, 0.0, 0.0), 0.1)
KERNEL = GaussianEnergy(2.0, 1.0, 0.3)
ORIGIN = (0.0, 0.0, 0.0, 0.0)


def _rel(a, b):
    return abs(a - b) / max(abs(b), 1e-300)


# ------------------------------------------------------------ worldlines

@given(st.floats(-0.95, 0.95), st.floats(-5.0, 5.0))
@settings(max_examples=50, deadline=None)
def test_inertial_four_velocity_normalized(v, tau):
    u = np.asarray(Inertial(v).four_velocity(tau), dtype=float)
    norm = u[0] ** 2 - np.sum(u[1:] ** 2)
    assert abs(norm - 1.0) < 1e-12


@given(st.floats(0.1, 5.0), st.floats(-3.0, 3.0))
@settings(max_examples=50, deadline=None)
def test_accelerated_four_velocity_normalized(a, tau):
    u = np.asarray(UniformAcceleration(a).four_velocity(tau), dtype=float)
    norm = u[0] ** 2 - np.sum(u[1:] ** 2)
    # cosh^2 - sinh^2 cancels catastrophically at large a*tau, so judge the
    # residual against the magnitude of the terms
    assert abs(norm - 1.0) < 1e-12 * max(1.0, u[0] ** 2)


# ------------------------------------------------------------ responses

def test_vacuum_no_excitation():
    assert abs(udw_response(REST, VAC, 1.0)) < 1e-12


def test_vacuum_deexcitation_rate():
    assert _rel(udw_response(REST, VAC, -1.0), 1.0 / TWO_PI) < 1e-12


def test_stationary_thermal_equals_spectral_weight():
    for eps in (-2.0, -0.5, 0.4, 1.7):
        got = udw_response(REST, Thermal(0.8), eps)
        assert _rel(got, float(oracles.thermal_weight(-eps, 0.8))) < 1e-12


@pytest.mark.parametrize("eps,dt", [(-2.0, 3.0), (-1.0, 1.5), (0.7, 0.8), (2.0, 0.5)])
def test_windowed_vacuum_matches_contour_oracle(eps, dt):
    got = udw_response(REST, VAC, eps, dt)
    want = oracles.shifted_contour_response(eps, dt=dt).real
    assert _rel(got, want) < 1e-8


@pytest.mark.parametrize("eps,dt", [(1.0, 2.0), (-0.5, 1.0)])
def test_windowed_thermal_matches_contour_oracle(eps, dt):
    got = udw_response(REST, Thermal(1.0), eps, dt)
    want = oracles.shifted_contour_response(eps, dt=dt, temperature=1.0).real
    assert _rel(got, want) < 1e-6


def test_detailed_balance():
    temp = 1.3
    for mult in (0.5, 1.0, 2.0):
        eps = mult * temp
        ratio = udw_response(REST, Thermal(temp), eps) / udw_response(
            REST, Thermal(temp), -eps
        )
        assert _rel(ratio, np.exp(-eps / temp)) < 1e-12


def test_window_converges_to_stationary():
    # |eps| dt = 20 puts the window deep in the quasi-stationary regime
    for state, eps in ((VAC, -2.0), (Thermal(1.0), 2.0)):
        windowed = udw_response(REST, state, eps, 10.0)
        stationary = udw_response(REST, state, eps)
        assert _rel(windowed, stationary) < 1e-2


def test_accelerated_is_thermal():
    acc = UniformAcceleration(2.0)
    got = udw_response(acc, VAC, 1.0)
    want = udw_response(REST, Thermal(2.0 / TWO_PI), 1.0)
    assert _rel(got, want) < 1e-14
    orc = oracles.shifted_contour_response(1.0, acceleration=2.0).real
    assert _rel(got, orc) < 1e-4


def test_nonstationary_pairings_rejected():
    with pytest.raises(NonStationaryConfiguration):
        udw_response(UniformAcceleration(1.0), Thermal(1.0), 1.0)
    with pytest.raises(NonStationaryConfiguration):
        udw_response(Inertial(0.3), Thermal(1.0), 1.0)


def test_vacuum_response_boost_invariant():
    assert _rel(
        udw_response(Inertial(0.7), VAC, -1.0), udw_response(REST, VAC, -1.0)
    ) < 1e-14


def test_windowed_response_nonnegative():
    vals = [udw_response(REST, Thermal(1.0), float(e), 1.7)
            for e in np.linspace(-3.0, 3.0, 21)]
    assert min(vals) >= -1e-10


def test_massive_line_worldline_vs_grid_rate():
    # 1+1 massive de-excitation: the windowed worldline response equals the
    # vacuum rate of a Gaussian band kernel with matched width and amplitude
    m, e0, dt = 1.0, 2.5, 4.0
    resp = udw_response(REST, VAC, -e0, dt, mass=m, spatial_dim=1)
    grid = momentum_grid(4096, 40.0, m)
    kern = GaussianEnergy(2.0 * dt * np.sqrt(np.pi), e0, dt, band_mass=m)
    assert _rel(resp, vacuum_rate(kern, grid).value) < 2e-3


# ------------------------------------------------------- photodetection

def test_pulse_amplitude_normalized():
    from scalardet.limits import pulse_grid

    grid = pulse_grid(PULSE, n_per_axis=15)
    total = np.sum(grid.weights * PULSE.amplitude(grid.kvecs))
    assert abs(total - PULSE.z0) < 1e-4


def test_floor_against_fine_quadrature():
    terms = glauber_terms(PULSE, KERNEL, ORIGIN)
    k = np.linspace(0.0, KERNEL.e0 + 10.0 / KERNEL.tau, 300001)
    w = np.gradient(k)
    want = np.sum(w * k * 2.0 * np.exp(-((KERNEL.tau * (k - KERNEL.e0)) ** 2))) / (
        4.0 * np.pi**2
    )
    assert _rel(terms.p0, want) < 1e-6
    # and the floor is exactly the state-independent spherical rate
    spherical = vacuum_rate_spherical(KERNEL, KERNEL.e0 + 10.0 / KERNEL.tau, n_k=65536)
    assert _rel(terms.p0, spherical.value) < 1e-6


def test_floor_independent_of_pulse_and_point():
    a = glauber_terms(PULSE, KERNEL, ORIGIN)
    b = glauber_terms(
        CoherentPulse(0.5 + 0.2j, (0.0, 2.0, 0.0), 0.15), KERNEL, (1.0, 0.3, -0.2, 0.5)
    )
    assert _rel(a.p0, b.p0) < 1e-14


def test_corotating_term_saddle_value():
    # narrow pulse, flat kernel across its band: P1 = |z0|^2 R(k0) / 2 on the
    # classical ray
    want = 0.5 * abs(PULSE.z0) ** 2 * 2.0
    assert _rel(glauber_terms(PULSE, KERNEL, ORIGIN).p1, want) < 0.05
    on_ray = glauber_terms(PULSE, KERNEL, (2.0, 2.0, 0.0, 0.0))
    assert _rel(on_ray.p1, want) < 0.05


def test_corotating_term_transverse_envelope():
    want = 0.5 * abs(PULSE.z0) ** 2 * 2.0
    off = glauber_terms(PULSE, KERNEL, (0.0, 3.0 / PULSE.delta, 0.0, 0.0))
    assert _rel(off.p1 / want, np.exp(-9.0)) < 0.2


def test_rwa_identity():
    terms = glauber_terms(PULSE, KERNEL, ORIGIN)
    assert _rel(rwa_density(PULSE, KERNEL, ORIGIN), terms.p0 + terms.p1) < 1e-14
    assert abs((terms.total - terms.rwa) - terms.p2) < 1e-15


def test_counter_rotating_suppression_by_averaging():
    raw = glauber_terms(PULSE, KERNEL, ORIGIN)
    mags = []
    for c in (1.0, 2.0, 3.0):
        samp = SamplingFunctions(delta_t=c / PULSE.kmag0, delta_x=c / PULSE.kmag0)
        mags.append(abs(glauber_terms(PULSE, KERNEL, ORIGIN, sampling=samp).p2))
    assert mags[0] > mags[1] > mags[2]
    # super-polynomial: successive ratios grow
    assert mags[1] / mags[2] > mags[0] / mags[1] > 1.0
    # the unaveraged counter-rotating term is not small; the averaging does it
    assert abs(raw.p2) > 0.1 * raw.p1


def test_point_kernel_limit():
    kern_small = GaussianEnergy(1.0, 1.0, 0.01)  # tau |k0| = 0.01
    k_max = 3.0
    rv = rwa_density(PULSE, kern_small, ORIGIN, k_max=k_max)
    pt = glauber_point_limit(PULSE, ORIGIN, k_max=k_max)
    assert _rel(rv, pt.value) < 0.01
    assert pt.uv_divergent and pt.cutoff == k_max


def test_pulse_part_quadratic_in_amplitude():
    k_max = 3.0
    base = glauber_point_limit(PULSE, ORIGIN, k_max=k_max)
    doubled = glauber_point_limit(
        CoherentPulse(2.0, (1.0, 0.0, 0.0), 0.1), ORIGIN, k_max=k_max
    )
    floor = k_max**2 / (8.0 * np.pi**2)
    assert _rel(doubled.value - floor, 4.0 * (base.value - floor)) < 1e-10


def test_deep_infrared_breaks_rwa():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ScaleSeparationWarning)
        deep = CoherentPulse(1.0, (0.1, 0.0, 0.0), 0.1)
    high = CoherentPulse(1.0, (1.0, 0.0, 0.0), 0.1)
    samp = SamplingFunctions(delta_t=5.0, delta_x=5.0)
    kern = GaussianEnergy(1.0, 0.5, 0.2)
    errs = {}
    for name, pulse in (("deep", deep), ("high", high)):
        terms = glauber_terms(pulse, kern, ORIGIN, sampling=samp)
        errs[name] = abs(terms.p2) / terms.total
    assert errs["deep"] > 10.0 * errs["high"]


def test_profile_thread_determinism():
    points = np.stack(
        [np.linspace(0, 3, 7), np.linspace(0, 3, 7), np.zeros(7), np.zeros(7)], axis=1
    )
    s1 = glauber_profile(PULSE, KERNEL, points, threads=1)
    s4 = glauber_profile(PULSE, KERNEL, points, threads=4)
    assert np.array_equal(s1.p1, s4.p1)
    assert np.array_equal(s1.p2, s4.p2)


def test_flat_kernel_needs_cutoff():
    with pytest.raises(QuadratureDivergence):
        glauber_terms(PULSE, MaximalLocalization(1.0), ORIGIN)
    terms = glauber_terms(PULSE, MaximalLocalization(1.0), ORIGIN, k_max=5.0)
    assert terms.uv_divergent


def test_infrared_pulse_warns():
    with pytest.warns(ScaleSeparationWarning):
        CoherentPulse(1.0, (0.2, 0.0, 0.0), 0.1)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        CoherentPulse(1.0, (1.0, 0.0, 0.0), 0.1)  # 10 widths out: quiet
