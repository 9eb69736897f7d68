import numpy as np
import pytest

from reactpatch import _kernels
from reactpatch.disk_steklov import _solve_unit, unit_grid
from reactpatch.errors import ConfigError

pytestmark = pytest.mark.skipif(_kernels.NUMBA_KERNELS is None, reason="numba not installed")


def test_nystrom_backends_agree():
    r = unit_grid(200)
    x = np.linspace(0.0, 1.0, 57)
    for pts in (r, x):
        a_np = _kernels.NUMPY_KERNELS["nystrom_matrix"](pts, r)
        a_nb = _kernels.NUMBA_KERNELS["nystrom_matrix"](pts, r)
        np.testing.assert_allclose(a_nb, a_np, rtol=1e-10, atol=1e-12)


def test_legendre_backends_agree():
    x = np.polynomial.legendre.leggauss(302)[0]
    a = _kernels.NUMPY_KERNELS["legendre_table"](300, x)
    b = _kernels.NUMBA_KERNELS["legendre_table"](300, x)
    np.testing.assert_allclose(a, b, rtol=0, atol=1e-13)


def test_ellipk_backends_agree():
    kp = np.geomspace(1e-14, 1.0, 500)
    np.testing.assert_allclose(
        _kernels.NUMBA_KERNELS["ellipk_cm"](kp), _kernels.NUMPY_KERNELS["ellipk_cm"](kp), rtol=1e-14
    )


def test_backend_selection(monkeypatch):
    monkeypatch.setenv("REACTPATCH_BACKEND", "numpy")
    assert _kernels.selected_backend() == "numpy"
    assert _kernels.kernels() is _kernels.NUMPY_KERNELS
    monkeypatch.setenv("REACTPATCH_BACKEND", "NUMBA")
    assert _kernels.kernels() is _kernels.NUMBA_KERNELS
    monkeypatch.setenv("REACTPATCH_BACKEND", "fortran")
    with pytest.raises(ConfigError):
        _kernels.selected_backend()


def test_spectrum_independent_of_backend(monkeypatch):
    results = {}
    for name in ("numpy", "numba"):
        monkeypatch.setenv("REACTPATCH_BACKEND", name)
        _solve_unit.cache_clear()
        results[name] = _solve_unit(16, 120).mu_unit.copy()
    _solve_unit.cache_clear()
    np.testing.assert_allclose(results["numpy"], results["numba"], rtol=1e-10)
