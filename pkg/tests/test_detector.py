"""Detector kernels, localization matrices, and sampling windows."""
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from scalardet.detector import (
    GaussianEnergy,
    MaximalLocalization,
    SamplingFunctions,
    TabulatedOnShell,
    gaussian_identity_residual,
    is_positive_localization,
    kernel_fourier,
    kernel_profile,
    localization_matrix,
)
from scalardet.errors import ScaleSeparationWarning


def test_fourier_transform_confined_to_forward_cone():
    kern = GaussianEnergy(1.3, 2.0, 0.7, band_mass=0.5)
    xi0 = np.array([-1.0, 0.3, 0.3, 2.0])
    xivec = np.array([0.5, 0.9, 0.3, 0.4])
    vals = kernel_fourier(kern, xi0, xivec)
    outside = xi0 < xivec
    assert np.all(vals[outside] == 0.0)
    assert np.all(vals[~outside] >= 0.0)


def test_profile_positive_and_peaked():
    kern = GaussianEnergy(2.0, 3.0, 0.5, band_mass=1.0)
    k = np.linspace(0.0, 10.0, 401)
    pr = kernel_profile(kern, k)
    assert np.all(pr > 0.0)
    k_peak = k[np.argmax(pr)]
    # peak sits where the band energy crosses e0: k = sqrt(e0^2 - mb^2)
    assert abs(k_peak - np.sqrt(3.0**2 - 1.0**2)) < 0.05


def test_localization_diagonal_and_symmetry():
    kern = GaussianEnergy(1.0, 2.5, 0.8, band_mass=1.0)
    p = np.linspace(-3.0, 3.0, 41)
    s = localization_matrix(kern, p, mass=1.0)
    assert np.all(s.diagonal() == 1.0)
    assert np.allclose(s, s.T)


def test_localization_methods_agree():
    kern = GaussianEnergy(0.7, 2.0, 0.6, band_mass=0.8)
    p = np.linspace(-2.5, 2.5, 31)
    s_log = localization_matrix(kern, p, mass=0.8, method="log")
    s_ratio = localization_matrix(kern, p, mass=0.8, method="ratio")
    assert np.max(np.abs(s_log - s_ratio)) < 1e-10


def test_maximal_localization_is_all_ones():
    s = localization_matrix(MaximalLocalization(2.0), np.linspace(-4, 4, 17))
    assert np.array_equal(s, np.ones_like(s))


def test_positivity_report_flat_vs_filtered():
    # a flat kernel gives the all-ones matrix: the one genuinely positive case
    probe = np.linspace(-3.0, 3.0, 41)
    rep = is_positive_localization(MaximalLocalization(1.0), probe)
    assert rep.passed
    assert rep.max_entry == 1.0
    assert rep.min_eigenvalue >= -1e-10
    # an energy filter is not one: the on-shell momentum midpoint of two
    # off-peak nodes can land on the profile peak, pushing entries above 1
    rep = is_positive_localization(GaussianEnergy(1.0, 2.5, 0.8, band_mass=1.0), probe)
    assert not rep.passed
    assert rep.max_entry > 1.0
    assert rep.min_eigenvalue < -rep.tol


@given(st.floats(0.5, 5.0), st.floats(0.1, 2.0))
@settings(max_examples=40, deadline=None)
def test_massless_band_localization_closed_form(e0, tau):
    # for a massless band on same-sign momenta the peak position and the
    # amplitude both drop out: S(p, p') = exp(tau^2 (p - p')^2 / 4)
    kern = GaussianEnergy(1.0, e0, tau)
    p = np.linspace(0.2, 2.0, 11)
    s = localization_matrix(kern, p)
    assert np.all(s.diagonal() == 1.0)
    want = np.exp(tau**2 * (p[:, None] - p[None, :]) ** 2 / 4.0)
    assert np.max(np.abs(s - want) / want) < 1e-12


def test_tabulated_reproduces_generating_family():
    kern = GaussianEnergy(1.2, 2.0, 0.7, band_mass=0.5)
    nodes = np.linspace(0.05, 6.0, 200)
    tab = TabulatedOnShell(nodes, kernel_profile(kern, nodes), band_mass=0.5)
    probe = np.linspace(0.1, 5.5, 77)
    # log-linear interpolation is not exact for a Gaussian-in-energy profile,
    # but on a 200-node table it is close; the matrix agreement is what matters
    s_a = localization_matrix(kern, probe, mass=0.5)
    s_b = localization_matrix(tab, probe, mass=0.5)
    assert np.max(np.abs(s_a - s_b) / s_a) < 1e-3


def test_tabulated_validation():
    with pytest.raises(ValueError):
        TabulatedOnShell(np.array([1.0, 0.5]), np.array([1.0, 1.0]))
    with pytest.raises(ValueError):
        TabulatedOnShell(np.array([0.5, 1.0]), np.array([1.0, -1.0]))


def test_sampling_average_factor():
    samp = SamplingFunctions(2.0, 1.5)
    assert samp.average_factor(0.0, 0.0) == 1.0
    dom = np.linspace(-3, 3, 13)
    assert np.all(samp.average_factor(dom, np.abs(dom)) <= 1.0)
    want = np.exp(-0.25 * (2.0 * 1.0) ** 2 - 0.25 * (1.5 * 0.5) ** 2)
    assert abs(samp.average_factor(1.0, 0.5) - want) < 1e-15


def test_sampling_volume():
    samp = SamplingFunctions(2.0, 1.5)
    want = (np.sqrt(np.pi) * 2.0) * (np.sqrt(np.pi) * 1.5) ** 3
    assert abs(samp.spacetime_volume(3) - want) < 1e-12


def test_scale_separation_warning():
    kern = GaussianEnergy(1.0, 2.0, 0.5)
    with pytest.warns(ScaleSeparationWarning):
        SamplingFunctions(1.0, 1.0).check_scale_separation(kern)


@given(st.floats(-3.0, 3.0), st.floats(-3.0, 3.0), st.floats(0.3, 4.0))
@settings(max_examples=60, deadline=None)
def test_gaussian_window_identity(a, b, dt):
    samp = SamplingFunctions(dt, dt)
    assert gaussian_identity_residual(samp, a, b) < 1e-14
