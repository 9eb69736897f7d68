import math

import numpy as np
import pytest

from reactpatch.disk_steklov import capacitance, neumann_zeros
from reactpatch.errors import BracketError, ConfigError
from reactpatch.sphere_geometry import PatchLayout, platonic_layout, polar_layout
from reactpatch.steklov_asym import (
    EigenBranch,
    eigenfunction_on_patch,
    near_resonant_alphas,
    patch_integral,
    sdn_eigenvalues,
    sdn_identical_leading,
    sdn_sigma1_dirichlet_form,
    sn_near_resonant,
    sn_near_resonant_platonic,
    sn_nonresonant,
    zero_bulk_branches,
    zero_sum_basis,
)

ALPHA_PAIR = (math.log(2) - 1) / (4 * math.pi)


@pytest.fixture(scope="module")
def sdn_pair(model):
    return sdn_eigenvalues(model, polar_layout(2, epsilon=0.1), 3)


# ---------------------------------------------------------------- SDN


def test_sdn_roots_in_gaps(model, sdn_pair):
    mu = model.spectrum.mu
    lo = np.r_[0.0, mu]
    for k, b in enumerate(sdn_pair):
        assert lo[k] < b.sigma0 < mu[k]
        assert capacitance(model, -b.sigma0) == pytest.approx(-2 / math.pi, abs=1e-12)


def test_sdn_sigma1_two_forms(sdn_pair):
    for b in sdn_pair:
        alt = sdn_sigma1_dirichlet_form([2 / math.pi], b.extra["dC1"])
        assert b.sigma1 == pytest.approx(alt, rel=1e-10)


def test_sdn_identical_leading(model, sdn_pair):
    assert sdn_identical_leading(model, 2, 1.0) == pytest.approx(sdn_pair[0].sigma0, abs=1e-10)


def test_sdn_more_dirichlet_patches_raise_first_branch(model):
    first = [sdn_identical_leading(model, n, 1.0) for n in (2, 4, 6)]
    assert 0 < first[0] < first[1] < first[2] < model.spectrum.mu[0]


def test_sdn_steklov_index_symmetric(model):
    lay = polar_layout(2, epsilon=0.1)
    a = sdn_eigenvalues(model, lay, 2, 0)
    b = sdn_eigenvalues(model, lay, 2, 1)
    for x, y in zip(a, b):
        assert x.evaluate(0.1) == pytest.approx(y.evaluate(0.1), rel=1e-12)


def test_sdn_validation(model):
    with pytest.raises(ConfigError):
        sdn_eigenvalues(model, polar_layout(1), 1)
    with pytest.raises(ConfigError):
        sdn_eigenvalues(model, polar_layout(2), 1, steklov_index=2)
    with pytest.raises(BracketError):
        sdn_eigenvalues(model, polar_layout(2), 200)
    with pytest.raises(ConfigError):
        sdn_eigenvalues(model.with_mode("sigmoidal"), polar_layout(2), 1)


# ---------------------------------------------------------------- SN non-resonant


def test_single_patch_leading_are_neumann_zeros(model):
    branches = sn_nonresonant(model, polar_layout(1), 4)
    np.testing.assert_allclose([b.sigma0 for b in branches], neumann_zeros(model, 4)[1:], rtol=1e-9)
    assert all(b.flags == () for b in branches)


def test_identical_pair_flags_coincident_poles(model):
    branches = sn_nonresonant(model, polar_layout(2, epsilon=0.2), 2)
    assert all("coincident_poles" in b.flags for b in branches)


def test_unequal_pair_roots_in_merged_gaps(model):
    lay = PatchLayout(polar_layout(2).centers, [0.5, 1.0], (1.0, 1.0), 0.1)
    branches = sn_nonresonant(model, lay, 5)
    for b in branches:
        lo, hi = b.extra["gap"]
        assert lo < b.sigma0 < hi
        assert sum(b.extra["C"]) == pytest.approx(0.0, abs=1e-9)
        assert b.flags == ()


# ---------------------------------------------------------------- SN near-resonant


def test_pair_alpha_closed_form():
    (group,) = near_resonant_alphas(polar_layout(2).centers)
    alpha, vecs = group
    assert alpha == pytest.approx(ALPHA_PAIR, rel=1e-13)
    np.testing.assert_allclose(np.abs(vecs[:, 0]), 1 / math.sqrt(2))


@pytest.mark.parametrize("m", [2, 3, 5])
def test_zero_sum_basis(m):
    q = zero_sum_basis(m)
    np.testing.assert_allclose(q.T @ q, np.eye(m - 1), atol=1e-14)
    np.testing.assert_allclose(q.sum(axis=0), 0.0, atol=1e-14)


@pytest.mark.parametrize("n, mults", [(4, [3]), (6, [2, 3]), (8, [1, 3, 3]), (12, [3, 3, 5]), (20, None)])
def test_platonic_multiplicities(model, n, mults):
    branches = sn_near_resonant_platonic(model, n, 0)
    got = [b.multiplicity for b in branches]
    assert sum(got) == n - 1
    if mults is not None:
        assert sorted(got) == mults


def test_near_resonant_pair_values(model):
    (b,) = sn_near_resonant(model, polar_layout(2), 0)
    assert b.sigma0 == model.spectrum.mu[0]
    assert b.extra["alpha"] == pytest.approx(ALPHA_PAIR, rel=1e-13)
    mu, d = model.spectrum.mu[0], model.spectrum.d[0]
    assert b.sigma1 == pytest.approx(mu * mu * d * d / (4 * math.pi), rel=1e-14)


def test_near_resonant_validation(model):
    with pytest.raises(ConfigError):
        sn_near_resonant(model, polar_layout(2), 500)
    with pytest.raises(ConfigError):
        sn_near_resonant(model, polar_layout(1), 0)


# ---------------------------------------------------------------- zero bulk and records


def test_zero_bulk_leading_only(model):
    branches = zero_bulk_branches(model, 3, radius=0.5)
    z = neumann_zeros(model, 3)[1:]
    for b, zz in zip(branches, z):
        assert b.sigma0 == pytest.approx(2 * zz)
        assert math.isnan(b.sigma1)
        assert b.evaluate(0.1) == b.sigma0
        assert b.flags == ("leading_order_only",)


def test_branch_regime_checked():
    with pytest.raises(ConfigError):
        EigenBranch("resonant", 0, 1.0, 0.0, 0.0)


def test_branch_record(model):
    b = sn_nonresonant(model, polar_layout(1), 1)[0]
    rec = b.record([0.1])
    assert rec["sigma(eps=0.1)"] == b.evaluate(0.1)
    assert rec["regime"] == "sn_nonresonant"


# ---------------------------------------------------------------- eigenfunctions


def test_nonresonant_eigenfunction_normalized(model):
    eps = 0.1
    b = sn_nonresonant(model, polar_layout(1), 1)[0]
    val = eps**2 * patch_integral(lambda r: eigenfunction_on_patch(b, model, r, eps) ** 2, 1.0)
    assert val == pytest.approx(1.0, rel=1e-10)


def test_sdn_eigenfunction_normalized(model, sdn_pair):
    eps = 0.1
    b = sdn_pair[0]
    val = eps**2 * patch_integral(lambda r: eigenfunction_on_patch(b, model, r, eps) ** 2, 1.0)
    assert val == pytest.approx(1.0, rel=1e-10)
    np.testing.assert_array_equal(eigenfunction_on_patch(b, model, [0.2], eps, patch=1), 0.0)


def test_near_resonant_eigenfunction(model):
    eps = 0.1
    (b,) = sn_near_resonant(model, polar_layout(2), 0)
    total = sum(
        patch_integral(lambda r: eigenfunction_on_patch(b, model, r, eps, p) ** 2, 1.0)
        for p in (0, 1)
    )
    assert eps**2 * total == pytest.approx(1.0, rel=1e-4)
    u0 = eigenfunction_on_patch(b, model, [0.3], eps, 0)
    u1 = eigenfunction_on_patch(b, model, [0.3], eps, 1)
    np.testing.assert_allclose(u0, -u1, rtol=1e-12)
    with pytest.raises(ConfigError):
        eigenfunction_on_patch(b, model, [0.3], eps, 2)
