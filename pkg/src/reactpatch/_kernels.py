"""Hot loops with two interchangeable backends.

The numba versions are compiled with ``@njit``; the numpy versions are
vectorized equivalents used when numba is unavailable or when the
environment variable ``REACTPATCH_BACKEND=numpy`` is set.  Both backends
are importable at all times (``NUMBA_KERNELS`` / ``NUMPY_KERNELS``) so the
test-suite and the benchmark can compare them directly.

Elliptic integrals here take the *complementary* modulus ``kp`` so that the
near-diagonal Nystrom kernel, where ``kp = |r - r'| / (r + r')`` is tiny, is
evaluated without cancellation.
"""

import math
import os

import numpy as np

from .errors import ConfigError

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    HAVE_NUMBA = False

_AGM_TOL = 1e-16
_AGM_MAXIT = 60
_COINCIDE = 1e-13


# ---------------------------------------------------------------------------
# numpy backend
# ---------------------------------------------------------------------------


def _agm_np(a, b):
    a = np.array(a, dtype=float, copy=True)
    b = np.array(b, dtype=float, copy=True)
    for _ in range(_AGM_MAXIT):
        if np.all(np.abs(a - b) <= _AGM_TOL * np.abs(a)):
            break
        a, b = 0.5 * (a + b), np.sqrt(a * b)
    return a


def ellipk_cm_np(kp):
    """K(k) from the complementary modulus kp = sqrt(1 - k^2)."""
    kp = np.asarray(kp, dtype=float)
    with np.errstate(divide="ignore"):
        return np.pi / (2.0 * _agm_np(np.ones_like(kp), kp))


def _log_hat_weights_np(x, r):
    """W[i, j] = int_0^1 log|t - x_i| phi_j(t) dt for hat functions phi_j on r."""
    a = r[:-1][None, :]
    b = r[1:][None, :]
    h = b - a
    c = x[:, None]

    def f0(u):
        au = np.abs(u)
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.where(au == 0.0, 0.0, u * np.log(au) - u)

    def f1(u):
        au = np.abs(u)
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.where(au == 0.0, 0.0, 0.5 * u * u * np.log(au) - 0.25 * u * u)

    ua = a - c
    ub = b - c
    i0 = f0(ub) - f0(ua)
    i1 = f1(ub) - f1(ua)
    right = (i1 + (c - a) * i0) / h
    left = i0 - right
    w = np.zeros((x.size, r.size))
    w[:, :-1] += left
    w[:, 1:] += right
    return w


def _trapezoid_weights(r):
    w = np.zeros_like(r)
    h = np.diff(r)
    w[:-1] += 0.5 * h
    w[1:] += 0.5 * h
    return w


def _nystrom_block_np(x, r, tw):
    xr = x[:, None]
    rr = r[None, :]
    s = xr + rr
    with np.errstate(divide="ignore", invalid="ignore"):
        k = 2.0 * np.sqrt(xr * rr) / s
        kp = np.abs(xr - rr) / s
        big_k = ellipk_cm_np(kp)  # K(k)
        big_kc = ellipk_cm_np(k)  # K(kp)
        log_coef = -(4.0 / (np.pi**2 * s)) * big_kc * rr
        full = (2.0 / (np.pi * s)) * big_k * rr
        smooth = full - log_coef * np.log(np.abs(xr - rr))
    coincide = np.abs(xr - rr) <= _COINCIDE * np.maximum(xr, 1.0)
    coincide_val = np.broadcast_to(np.log(8.0 * np.maximum(xr, 1e-300)) / np.pi, smooth.shape)
    smooth = np.where(coincide, coincide_val, smooth)
    at_origin_col = rr == 0.0
    smooth = np.where(at_origin_col, 0.0, smooth)
    log_coef = np.where(at_origin_col | coincide & (xr == 0.0), 0.0, log_coef)
    mat = log_coef * _log_hat_weights_np(x, r) + smooth * tw[None, :]
    zero_rows = x == 0.0
    if np.any(zero_rows):
        mat[zero_rows, :] = tw[None, :]
    return mat


def nystrom_matrix_np(x, r, block=256):
    """Product-integration matrix A with (A f)_i ~ int_0^1 k(x_i, t) f(t) t dt.

    ``r`` is the node grid on [0, 1] (first node 0, last node 1), ``x`` the
    evaluation points.  The log singularity of the kernel at t = x_i is
    integrated exactly against piecewise-linear hats; the remainder uses
    trapezoid weights.
    """
    x = np.ascontiguousarray(x, dtype=float)
    r = np.ascontiguousarray(r, dtype=float)
    tw = _trapezoid_weights(r)
    out = np.empty((x.size, r.size))
    for start in range(0, x.size, block):
        stop = min(start + block, x.size)
        out[start:stop] = _nystrom_block_np(x[start:stop], r, tw)
    return out


def legendre_table_np(nmax, x):
    """Rows P_0..P_nmax evaluated at the points x (three-term recurrence)."""
    x = np.asarray(x, dtype=float)
    p = np.empty((nmax + 1, x.size))
    p[0] = 1.0
    if nmax >= 1:
        p[1] = x
    for n in range(1, nmax):
        p[n + 1] = ((2 * n + 1) * x * p[n] - n * p[n - 1]) / (n + 1)
    return p


# ---------------------------------------------------------------------------
# numba backend
# ---------------------------------------------------------------------------

if HAVE_NUMBA:

    @njit(cache=True)
    def _agm_scalar(a, b):
        for _ in range(_AGM_MAXIT):
            if abs(a - b) <= _AGM_TOL * abs(a):
                break
            a, b = 0.5 * (a + b), math.sqrt(a * b)
        return a

    @njit(cache=True)
    def _ellipk_cm_scalar(kp):
        g = _agm_scalar(1.0, kp)
        if g == 0.0:
            return math.inf
        return math.pi / (2.0 * g)

    @njit(cache=True)
    def _ellipk_cm_nb(kp):
        out = np.empty(kp.size)
        flat = kp.ravel()
        for i in range(flat.size):
            out[i] = _ellipk_cm_scalar(flat[i])
        return out.reshape(kp.shape)

    def ellipk_cm_nb(kp):
        """K(k) from the complementary modulus kp (numba backend)."""
        arr = np.ascontiguousarray(kp, dtype=float)
        return _ellipk_cm_nb(arr)

    @njit(cache=True)
    def _f0(u):
        if u == 0.0:
            return 0.0
        return u * math.log(abs(u)) - u

    @njit(cache=True)
    def _f1(u):
        if u == 0.0:
            return 0.0
        return 0.5 * u * u * math.log(abs(u)) - 0.25 * u * u

    @njit(cache=True)
    def _nystrom_matrix_nb(x, r):
        n = r.size
        m = x.size
        tw = np.zeros(n)
        for j in range(n - 1):
            h = r[j + 1] - r[j]
            tw[j] += 0.5 * h
            tw[j + 1] += 0.5 * h
        out = np.zeros((m, n))
        logw = np.zeros(n)
        for i in range(m):
            xi = x[i]
            if xi == 0.0:
                for j in range(n):
                    out[i, j] = tw[j]
                continue
            for j in range(n):
                logw[j] = 0.0
            for j in range(n - 1):
                a = r[j]
                b = r[j + 1]
                h = b - a
                ua = a - xi
                ub = b - xi
                i0 = _f0(ub) - _f0(ua)
                i1 = _f1(ub) - _f1(ua)
                right = (i1 + (xi - a) * i0) / h
                logw[j] += i0 - right
                logw[j + 1] += right
            lim = math.log(8.0 * xi) / math.pi
            for j in range(n):
                rj = r[j]
                if rj == 0.0:
                    continue
                s = xi + rj
                diff = abs(xi - rj)
                k = 2.0 * math.sqrt(xi * rj) / s
                kp = diff / s
                log_coef = -(4.0 / (math.pi * math.pi * s)) * _ellipk_cm_scalar(k) * rj
                if diff <= _COINCIDE * max(xi, 1.0):
                    smooth = lim
                else:
                    full = (2.0 / (math.pi * s)) * _ellipk_cm_scalar(kp) * rj
                    smooth = full - log_coef * math.log(diff)
                out[i, j] = log_coef * logw[j] + smooth * tw[j]
        return out

    def nystrom_matrix_nb(x, r):
        """Product-integration matrix (numba backend); see ``nystrom_matrix_np``."""
        return _nystrom_matrix_nb(
            np.ascontiguousarray(x, dtype=float), np.ascontiguousarray(r, dtype=float)
        )

    @njit(cache=True)
    def _legendre_table_nb(nmax, x):
        p = np.empty((nmax + 1, x.size))
        for i in range(x.size):
            p[0, i] = 1.0
            if nmax >= 1:
                p[1, i] = x[i]
        for n in range(1, nmax):
            for i in range(x.size):
                p[n + 1, i] = ((2 * n + 1) * x[i] * p[n, i] - n * p[n - 1, i]) / (n + 1)
        return p

    def legendre_table_nb(nmax, x):
        """Rows P_0..P_nmax at x (numba backend)."""
        return _legendre_table_nb(int(nmax), np.ascontiguousarray(x, dtype=float).ravel())


NUMPY_KERNELS = {
    "ellipk_cm": ellipk_cm_np,
    "nystrom_matrix": nystrom_matrix_np,
    "legendre_table": legendre_table_np,
}

if HAVE_NUMBA:
    NUMBA_KERNELS = {
        "ellipk_cm": ellipk_cm_nb,
        "nystrom_matrix": nystrom_matrix_nb,
        "legendre_table": legendre_table_nb,
    }
else:  # pragma: no cover
    NUMBA_KERNELS = None


def selected_backend():
    """Name of the active backend, from ``REACTPATCH_BACKEND`` (default numba)."""
    wanted = os.environ.get("REACTPATCH_BACKEND", "numba").strip().lower()
    if wanted not in ("numba", "numpy"):
        raise ConfigError(f"REACTPATCH_BACKEND must be 'numba' or 'numpy', got {wanted!r}")
    if wanted == "numba" and not HAVE_NUMBA:
        return "numpy"
    return wanted


def kernels(backend=None):
    """Kernel table for ``backend`` (or the environment-selected one)."""
    name = backend or selected_backend()
    return NUMBA_KERNELS if name == "numba" else NUMPY_KERNELS


def nystrom_matrix(x, r):
    return kernels()["nystrom_matrix"](x, r)


def legendre_table(nmax, x):
    return kernels()["legendre_table"](nmax, x)


def ellipk_cm(kp):
    return kernels()["ellipk_cm"](kp)
