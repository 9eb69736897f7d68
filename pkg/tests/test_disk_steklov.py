import math
import warnings

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from oracles.galerkin import GALERKIN_D, GALERKIN_MU, galerkin_spectrum

from reactpatch.disk_steklov import (
    AccuracyWarning,
    CapacitanceModel,
    DiskSteklovSpectrum,
    cached_spectrum,
    capacitance,
    capacitance_derivative,
    capacitance_large_kappa,
    capacitance_sigmoidal,
    capacitance_taylor,
    charge_density,
    disk_taylor_coeffs_exact,
    disk_taylor_coeffs_quadrature,
    geometric_coeffs_arbitrary,
    monopole_E,
    monopole_E_dirichlet,
    monopole_E_heuristic,
    monopole_J,
    neumann_zeros,
    parse_reactivity,
    patch_C_E,
    patch_solution_w,
    patch_solution_wc,
    solve_disk_spectrum,
    taylor_coeffs,
)
from reactpatch.errors import ConfigError, PoleError
from reactpatch.steklov_asym import patch_integral

INF = math.inf
reactivities = st.floats(1e-3, 1e3)


# ---------------------------------------------------------------- spectrum


def test_spectrum_matches_live_galerkin(spectrum):
    mu, d = galerkin_spectrum(100, 450)
    np.testing.assert_allclose(spectrum.mu[:8], mu[:8], rtol=2e-4)
    np.testing.assert_allclose(spectrum.d[:8], d[:8], rtol=2e-4)


def test_spectrum_matches_frozen_galerkin(spectrum):
    np.testing.assert_allclose(spectrum.mu[:8], GALERKIN_MU, rtol=2e-4)
    np.testing.assert_allclose(spectrum.d[:8], GALERKIN_D, rtol=2e-4)


def test_spectrum_structure(spectrum):
    assert np.all(np.diff(spectrum.mu) > 0)
    assert np.all(spectrum.d > 0)
    # spacing approaches pi for the unit disk
    assert np.diff(spectrum.mu)[3:12] == pytest.approx(math.pi, rel=1e-3)
    # sum rule: sum d_k^2 <= |disk|, nearly saturated by 64 modes
    s = float(np.sum(spectrum.d**2))
    assert s < math.pi
    assert s > 0.999 * math.pi


def test_eigenfunctions_normalized(spectrum):
    r = spectrum.grid
    w = np.zeros_like(r)
    h = np.diff(r)
    w[:-1] += h / 2
    w[1:] += h / 2
    norms = 2 * np.pi * (spectrum.psi**2 * r * w).sum(axis=1)
    np.testing.assert_allclose(norms[:8], 1.0, atol=1e-12)


@given(st.floats(0.1, 5.0))
def test_dilation(a):
    base = solve_disk_spectrum(1.0, 16, 120)
    scaled = base.rescaled(a)
    np.testing.assert_allclose(scaled.mu, base.mu / a)
    np.testing.assert_allclose(scaled.d, base.d * a)
    m1, ma = CapacitanceModel(base), CapacitanceModel(scaled)
    assert capacitance(ma, 2.0) == pytest.approx(a * capacitance(m1, 2.0 * a), rel=1e-12)


def test_solver_rejects_bad_sizes():
    with pytest.raises(ConfigError):
        solve_disk_spectrum(1.0, 10, 20)
    with pytest.raises(ConfigError):
        solve_disk_spectrum(-1.0)


def test_serialization_round_trip_bit_exact(spectrum):
    back = DiskSteklovSpectrum.from_text(spectrum.to_text())
    assert np.array_equal(back.mu_unit, spectrum.mu_unit)
    assert np.array_equal(back.psi_unit, spectrum.psi_unit)
    assert np.array_equal(back.grid_unit, spectrum.grid_unit)


def test_serialization_rejects_other_versions(spectrum):
    text = spectrum.to_text().replace('"version": 1', '"version": 99')
    with pytest.raises(ConfigError):
        DiskSteklovSpectrum.from_text(text)
    with pytest.raises(ConfigError):
        DiskSteklovSpectrum.from_text("not json")


def test_cache_round_trip(tmp_path):
    first = cached_spectrum(1.0, 16, 120, tmp_path)
    files = list(tmp_path.iterdir())
    assert len(files) == 1
    second = cached_spectrum(1.0, 16, 120, tmp_path)
    assert np.array_equal(first.mu_unit, second.mu_unit)
    assert np.array_equal(first.psi_unit, second.psi_unit)


# ---------------------------------------------------------------- capacitance


def test_capacitance_dirichlet_limit(model):
    assert capacitance(model, INF) == pytest.approx(2 / math.pi, rel=5e-3)
    assert capacitance(model, 1e6) == pytest.approx(2 / math.pi, rel=5e-3)


@given(reactivities, reactivities)
def test_capacitance_monotone(small_model, k1, k2):
    lo, hi = sorted((k1, k2))
    assert capacitance(small_model, lo) <= capacitance(small_model, hi) + 1e-15
    assert capacitance_derivative(small_model, lo) > 0


@given(st.floats(0.01, 50.0))
def test_derivative_matches_difference(small_model, k):
    h = 1e-5 * max(k, 1.0)
    fd = (capacitance(small_model, k + h) - capacitance(small_model, k - h)) / (2 * h)
    assert capacitance_derivative(small_model, k) == pytest.approx(fd, rel=1e-6)


def test_taylor_coefficients_three_routes(model):
    spectral = taylor_coeffs(model, 3)
    exact = disk_taylor_coeffs_exact()
    quad = disk_taylor_coeffs_quadrature()
    assert spectral[0] == pytest.approx(0.5, abs=1e-6)
    assert exact[1] == pytest.approx(4 / (3 * math.pi), abs=1e-12)
    assert quad[1] == pytest.approx(4 / (3 * math.pi), abs=1e-12)
    for s, e, q in zip(spectral, exact, quad):
        assert s == pytest.approx(e, abs=1e-5)
        assert q == pytest.approx(e, abs=1e-12)
    assert exact[2] == pytest.approx(0.36512097, abs=1e-7)


def test_small_kappa_taylor(model):
    k = 0.01
    t = capacitance_taylor(1.0, disk_taylor_coeffs_exact(), k)
    assert capacitance(model, k) == pytest.approx(t, rel=2e-6)
    with pytest.warns(AccuracyWarning):
        capacitance_taylor(1.0, disk_taylor_coeffs_exact(), 0.6)


@pytest.mark.parametrize("k", [50.0, 200.0, 1000.0])
def test_large_kappa_asymptote(model, k):
    assert capacitance_large_kappa(1.0, k) == pytest.approx(capacitance(model, k), rel=1e-3)


def test_large_kappa_warns_when_small():
    with pytest.warns(AccuracyWarning):
        capacitance_large_kappa(1.0, 5.0)


def test_sigmoidal_limits():
    assert capacitance_sigmoidal(1.0, INF) == 2 / math.pi
    assert capacitance_sigmoidal(2.0, 1e-8) == pytest.approx(2.0 * 2.0 * 2e-8 / 4.0, rel=1e-6)


def test_modes_share_interface(spectrum):
    for mode in ("spectral", "sigmoidal", "taylor", "large_kappa"):
        m = CapacitanceModel(spectrum, mode)
        k = 0.1 if mode == "taylor" else 20.0
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", AccuracyWarning)
            assert capacitance(m, k) > 0
            assert capacitance_derivative(m, k) > 0
    with pytest.raises(ConfigError):
        CapacitanceModel(spectrum, "cubic")


def test_pole_detection(model):
    mu0 = float(model.spectrum.mu[0])
    with pytest.raises(PoleError):
        capacitance(model, -mu0)
    with pytest.raises(PoleError):
        capacitance(model, -1.1 * float(model.spectrum.mu[-1]))
    # a hair outside the tolerance is evaluable and large
    assert abs(capacitance(model, -mu0 * (1 + 1e-5))) > 1e3


def test_reactivity_parsing():
    assert parse_reactivity("inf") == INF
    assert parse_reactivity(" Dirichlet ") == INF
    assert parse_reactivity("2.5") == 2.5
    for bad in ("nan", "-inf", "fast"):
        with pytest.raises(ConfigError):
            parse_reactivity(bad)


# ---------------------------------------------------------------- patch fields


@pytest.mark.parametrize("k", [0.5, 5.0])
def test_flux_equals_pi_capacitance(model, k):
    total = patch_integral(lambda r: charge_density(model, k, r), 1.0, 200)
    assert total == pytest.approx(math.pi * capacitance(model, k), rel=1e-4)


def test_dirichlet_flux_closed_form(model):
    r = np.array([0.0, 0.5, 0.9])
    np.testing.assert_allclose(charge_density(model, INF, r), 1 / (math.pi * np.sqrt(1 - r * r)))
    with pytest.raises(ConfigError):
        charge_density(model, INF, 1.0)


def test_charge_density_methods_agree(model):
    r = np.linspace(0.05, 0.9, 7)
    np.testing.assert_allclose(
        charge_density(model, 5.0, r, "series"), charge_density(model, 5.0, r, "direct"), rtol=1e-4
    )


def test_w_limits(model):
    r = np.linspace(0.0, 0.95, 5)
    np.testing.assert_array_equal(patch_solution_w(model, INF, r), 1.0)
    w = patch_solution_w(model, 1e-3, r)
    assert np.all((w > 0) & (w < 2e-3))


def test_wc_is_sigma_derivative(model):
    r = np.array([0.2, 0.6])
    s, h = 0.5, 1e-5
    fd = (patch_solution_w(model, -(s + h), r) - patch_solution_w(model, -(s - h), r)) / (2 * h)
    np.testing.assert_allclose(patch_solution_wc(model, s, r), fd, rtol=1e-6)


# ---------------------------------------------------------------- monopole


def test_monopole_dirichlet_quadrature(model):
    closed = (3 - 4 * math.log(2)) / math.pi**2
    assert monopole_E_dirichlet(1.0) == pytest.approx(closed, rel=1e-14)
    assert monopole_E(model, INF) == pytest.approx(closed, abs=1e-4)


def test_monopole_small_kappa_ratio(model):
    k = 1e-3
    assert monopole_E(model, k) / capacitance(model, k) ** 2 == pytest.approx(0.125, abs=1e-3)


def test_monopole_dilation(model):
    a, k = 0.5, 3.0
    ma = model.for_radius(a)
    expect = -0.5 * math.log(a) * capacitance(ma, k) ** 2 + a * a * monopole_E(model, k * a)
    assert monopole_E(ma, k) == pytest.approx(expect, rel=1e-12)


def test_monopole_heuristic_close(model):
    for k in (0.3, 3.0, 30.0):
        assert monopole_E_heuristic(1.0, k) == pytest.approx(monopole_E(model, k), rel=7e-3)


def test_patch_C_E_exact_for_dirichlet(model):
    c, e = patch_C_E(model, INF)
    assert c == 2 / math.pi
    assert e == monopole_E_dirichlet(1.0)


def test_monopole_J_values(model):
    # Derived from the nested quadrature at the default spectrum; reused by the SN tests
    assert monopole_J(model, 0) == pytest.approx(0.931696, rel=1e-5)
    assert monopole_J(model, 1) == pytest.approx(19.21727, rel=1e-5)


# ---------------------------------------------------------------- zeros


def test_neumann_zeros_interlace(model):
    zeros = neumann_zeros(model, 6)
    mu = model.spectrum.mu
    assert zeros[0] == 0.0
    for k in range(1, 7):
        assert mu[k - 1] < zeros[k] < mu[k]
        assert abs(capacitance(model, -zeros[k])) < 1e-8


def test_neumann_zero_values(model):
    np.testing.assert_allclose(neumann_zeros(model, 3)[1:], (4.1213, 7.3421, 10.517), rtol=5e-5)


# ---------------------------------------------------------------- arbitrary shape


def test_polygon_circle_matches_disk():
    t = np.linspace(0.0, 2 * np.pi, 400, endpoint=False)
    area, c2, c3 = geometric_coeffs_arbitrary(np.c_[np.cos(t), np.sin(t)])
    exact = disk_taylor_coeffs_exact()
    assert area == pytest.approx(math.pi, rel=1e-4)
    assert c2 == pytest.approx(exact[1], rel=1e-4)
    assert c3 == pytest.approx(exact[2], rel=1e-4)


def test_polygon_orientation_invariant():
    sq = np.array([[1.0, 0.0], [0.0, 1.0], [-1.0, 0.0], [0.0, -1.0]])
    a = geometric_coeffs_arbitrary(sq)
    b = geometric_coeffs_arbitrary(sq[::-1])
    np.testing.assert_allclose(a, b, rtol=1e-12)
    assert a[0] == pytest.approx(2.0)


def test_polygon_self_intersection_rejected():
    bow = np.array([[0.0, 0.0], [1.0, 1.0], [1.0, 0.0], [0.0, 1.0]])
    with pytest.raises(ConfigError):
        geometric_coeffs_arbitrary(bow)
