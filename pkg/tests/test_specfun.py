import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import special

from reactpatch.errors import DomainError
from reactpatch.specfun import (
    elliptic_e,
    elliptic_e_quad,
    elliptic_k,
    elliptic_k_complement,
    elliptic_k_quad,
    legendre_p,
    legendre_table,
)

moduli = st.floats(0.0, 0.995)
unit_x = st.floats(-1.0, 1.0)


@given(st.integers(0, 80), unit_x)
def test_legendre_matches_scipy(n, x):
    assert legendre_p(n, x) == pytest.approx(special.eval_legendre(n, x), abs=1e-12)


def test_legendre_negative_one_is_one():
    assert legendre_p(-1, 0.3) == 1.0
    assert np.all(legendre_p(-1, np.array([-1.0, 0.0, 1.0])) == 1.0)


@pytest.mark.parametrize("n, x", [(-2, 0.0), (1.5, 0.0), (3, 1.1)])
def test_legendre_rejects_bad_input(n, x):
    with pytest.raises(DomainError):
        legendre_p(n, x)


def test_legendre_table_rows_and_endpoints():
    x = np.linspace(-1.0, 1.0, 41)
    tab = legendre_table(30, x)
    assert tab.shape == (31, 41)
    for n in (0, 1, 7, 30):
        np.testing.assert_allclose(tab[n], special.eval_legendre(n, x), atol=1e-13)
    np.testing.assert_allclose(tab[:, -1], 1.0, atol=1e-13)
    np.testing.assert_allclose(tab[:, 0], (-1.0) ** np.arange(31), atol=1e-13)


@given(moduli)
def test_elliptic_k_against_quadrature(k):
    assert elliptic_k(k) == pytest.approx(elliptic_k_quad(k), rel=1e-12)
    assert elliptic_k(k) == pytest.approx(special.ellipk(k * k), rel=1e-12)


@given(st.floats(0.0, 1.0))
def test_elliptic_e_against_quadrature(k):
    assert elliptic_e(k) == pytest.approx(elliptic_e_quad(k), rel=1e-12, abs=1e-14)


@given(st.floats(0.01, 0.99))
def test_legendre_relation(k):
    kp = math.sqrt(1.0 - k * k)
    K, E = elliptic_k(k), elliptic_e(k)
    Kp, Ep = elliptic_k(kp), elliptic_e(kp)
    assert E * Kp + Ep * K - K * Kp == pytest.approx(math.pi / 2.0, rel=1e-12)


def test_elliptic_special_values():
    assert elliptic_k(0.0) == pytest.approx(math.pi / 2.0, rel=1e-15)
    assert elliptic_e(0.0) == pytest.approx(math.pi / 2.0, rel=1e-15)
    assert elliptic_e(1.0) == 1.0


def test_complement_keeps_log_behaviour():
    for kp in (1e-6, 1e-10, 1e-14):
        assert elliptic_k_complement(kp) == pytest.approx(math.log(4.0 / kp), rel=1e-9)


def test_elliptic_vectorized_shape():
    k = np.linspace(0.0, 0.9, 12).reshape(3, 4)
    assert elliptic_e(k).shape == (3, 4)
    assert elliptic_k(k).shape == (3, 4)


@pytest.mark.parametrize("fun, k", [(elliptic_k, 1.0), (elliptic_k, -0.1), (elliptic_e, 1.2)])
def test_elliptic_domain(fun, k):
    with pytest.raises(DomainError):
        fun(k)
