"""Legendre polynomials and complete elliptic integrals.

Elliptic integrals use the *modulus* convention throughout:
``K(k) = int_0^{pi/2} (1 - k^2 sin^2 t)^(-1/2) dt`` (not the parameter m = k^2
used by scipy.special.ellipk).
"""

import math

import numpy as np
from scipy import integrate

from . import _kernels
from .errors import DomainError

_X_TOL = 1e-12


def legendre_p(n, x):
    """P_n(x) by the three-term recurrence.

    ``n = -1`` returns 1, the convention used when P_{m+n-2k-1} appears with
    a negative index in closed-form Legendre product integrals.
    """
    if int(n) != n or n < -1:
        raise DomainError(f"legendre_p: order must be an integer >= -1, got {n}")
    xa = np.asarray(x, dtype=float)
    if np.any(np.abs(xa) > 1.0 + _X_TOL):
        raise DomainError("legendre_p: |x| must not exceed 1")
    n = int(n)
    if n <= 0:
        out = np.ones_like(xa)
    else:
        p_prev = np.ones_like(xa)
        p = xa.copy()
        for k in range(1, n):
            p_prev, p = p, ((2 * k + 1) * xa * p - k * p_prev) / (k + 1)
        out = p
    return float(out) if out.ndim == 0 else out


def legendre_table(nmax, x):
    """Array of shape (nmax + 1, len(x)) holding P_0(x) .. P_nmax(x)."""
    if nmax < 0:
        raise DomainError("legendre_table: nmax must be >= 0")
    xa = np.atleast_1d(np.asarray(x, dtype=float))
    if np.any(np.abs(xa) > 1.0 + _X_TOL):
        raise DomainError("legendre_table: |x| must not exceed 1")
    return _kernels.legendre_table(int(nmax), xa)


def _check_modulus(k, upper_open):
    ka = np.asarray(k, dtype=float)
    if np.any(ka < 0.0) or np.any(ka > 1.0) or np.any(np.isnan(ka)):
        raise DomainError("elliptic modulus must lie in [0, 1]")
    if upper_open and np.any(ka == 1.0):
        raise DomainError("elliptic_k diverges at modulus 1")
    return ka


def _agm_with_sum(k):
    """AGM(1, k') together with sum 2^(n-1) c_n^2 needed for E."""
    a = np.ones_like(k)
    b = np.sqrt((1.0 - k) * (1.0 + k))
    c = k.copy()
    acc = 0.5 * c * c
    weight = 0.5
    for _ in range(60):
        if np.all(np.abs(c) <= 1e-17 * np.abs(a)):
            break
        c = 0.5 * (a - b)
        a, b = 0.5 * (a + b), np.sqrt(a * b)
        weight *= 2.0
        acc = acc + weight * c * c
    return a, acc


def elliptic_k(k):
    """Complete elliptic integral of the first kind K(k), modulus k in [0, 1)."""
    ka = _check_modulus(k, upper_open=True)
    kp = np.sqrt((1.0 - ka) * (1.0 + ka))
    out = _kernels.ellipk_cm_np(kp)
    return float(out) if np.ndim(out) == 0 else out


def elliptic_k_complement(kp):
    """K evaluated from the complementary modulus kp = sqrt(1 - k^2).

    Accurate when k is close to 1 (kp small), where forming k first would lose
    the logarithmic behaviour to rounding.
    """
    kpa = np.asarray(kp, dtype=float)
    if np.any(kpa <= 0.0) or np.any(kpa > 1.0):
        raise DomainError("complementary modulus must lie in (0, 1]")
    out = _kernels.ellipk_cm_np(kpa)
    return float(out) if np.ndim(out) == 0 else out


def elliptic_e(k):
    """Complete elliptic integral of the second kind E(k), modulus k in [0, 1]."""
    ka = np.atleast_1d(_check_modulus(k, upper_open=False)).astype(float)
    out = np.empty_like(ka)
    edge = ka == 1.0
    out[edge] = 1.0
    inner = ~edge
    if np.any(inner):
        a, acc = _agm_with_sum(ka[inner])
        out[inner] = (np.pi / (2.0 * a)) * (1.0 - acc)
    return float(out[0]) if np.ndim(k) == 0 else out.reshape(np.shape(k))


def elliptic_k_quad(k):
    """Adaptive-quadrature K(k); slow reference used by property tests."""
    k = float(_check_modulus(k, upper_open=True))
    val, _ = integrate.quad(
        lambda t: 1.0 / math.sqrt(1.0 - (k * math.sin(t)) ** 2),
        0.0,
        math.pi / 2,
        epsabs=1e-14,
        epsrel=1e-13,
        limit=200,
    )
    return val


def elliptic_e_quad(k):
    """Adaptive-quadrature E(k); slow reference used by property tests."""
    k = float(_check_modulus(k, upper_open=False))
    val, _ = integrate.quad(
        lambda t: math.sqrt(max(0.0, 1.0 - (k * math.sin(t)) ** 2)),
        0.0,
        math.pi / 2,
        epsabs=1e-14,
        epsrel=1e-13,
        limit=200,
    )
    return val
