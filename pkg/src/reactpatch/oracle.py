"""Legendre-matrix solver for the axisymmetric Steklov-Neumann problem with one
or two polar circular patches.

The eigenfunction is expanded as sum c_n r^n P_n(cos theta).  The Steklov
condition on the patches, projected onto P_m, gives

    m c_m = lambda sum_n K_mn c_n,   K_mn = (m + 1/2) int_patch P_m P_n sin(theta) dtheta,

with lambda = sigma / eps for a patch of polar angle eps.  The m = 0 row fixes
c_0 in terms of the others; eliminating it leaves M C = (1 / lambda) C with
M_mn = (K_mn - K_m0 K_0n / K_00) / m for m, n >= 1.

Patch sizes are polar angles here.  ``sphere_geometry.chord_from_angle``
converts to the chord convention.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import linalg

from .errors import ConfigError, ConvergenceError, DomainError
from .specfun import legendre_p, legendre_table

MIN_NMAX = 100
IMAG_TOLERANCE = 1e-8
CLOSED_FORM_TOLERANCE = 1e-10


def _check_angle(eps):
    if not 0.0 < eps < math.pi:
        raise DomainError(f"patch angle must lie in (0, pi), got {eps!r}")


def a_sequence(k_max):
    """A_k = Gamma(k + 1/2) / (sqrt(pi) Gamma(k + 1)) via A_k = A_{k-1} (k - 1/2) / k."""
    if k_max < 0:
        raise ConfigError("k_max must be >= 0")
    a = np.empty(k_max + 1)
    a[0] = 1.0
    for k in range(1, k_max + 1):
        a[k] = a[k - 1] * (k - 0.5) / k
    return a


def _overlap_single(n_max, eps):
    """S_mn = int_0^eps P_m P_n sin(theta) dtheta by Gauss-Legendre in cos(theta).

    n_max + 2 nodes integrate the degree-2 n_max integrand exactly.
    """
    _check_angle(eps)
    g, w = np.polynomial.legendre.leggauss(n_max + 2)
    c = math.cos(eps)
    x = 0.5 * (1.0 - c) * g + 0.5 * (1.0 + c)
    w = 0.5 * (1.0 - c) * w
    p = legendre_table(n_max, x)
    return (p * w) @ p.T


def overlap_matrix(n_max, angles):
    """Unweighted overlaps S_mn over one north patch, plus a south patch if two
    angles are given (parity (-1)^(m+n))."""
    angles = _angles(angles)
    s = _overlap_single(n_max, angles[0])
    if len(angles) == 2:
        sgn = (-1.0) ** np.arange(n_max + 1)
        s = s + np.outer(sgn, sgn) * _overlap_single(n_max, angles[1])
    return s


def _angles(angles):
    if np.isscalar(angles):
        angles = (float(angles),)
    angles = tuple(float(a) for a in angles)
    if len(angles) not in (1, 2):
        raise ConfigError("the oracle handles one or two polar patches")
    for a in angles:
        _check_angle(a)
    if len(angles) == 2 and angles[0] + angles[1] >= math.pi:
        raise DomainError("north and south patches overlap")
    return angles


def k_matrix(n_max, angles):
    """K_mn = (m + 1/2) S_mn for m, n = 0..n_max."""
    s = overlap_matrix(n_max, angles)
    return (np.arange(n_max + 1) + 0.5)[:, None] * s


def k_element(m, n, eps):
    """Single north-patch element K_mn(eps) by quadrature."""
    if m < 0 or n < 0:
        raise ConfigError("indices must be nonnegative")
    return float(k_matrix(max(m, n), eps)[m, n])


def k_element_two(m, n, eps1, eps2):
    """Element for a north patch eps1 plus a south patch eps2."""
    return k_element(m, n, eps1) + (-1.0) ** (m + n) * k_element(m, n, eps2)


def k_element_closed_form(m, n, eps):
    """K_mn from the finite Legendre sum

        (m + 1/2) sum_k B^k_mn (P_{m+n-2k-1}(c) - P_{m+n-2k+1}(c)) / (2(m+n-2k) + 1),
        B^k_mn = A_k A_{m-k} A_{n-k} / A_{m+n-k} (2m+2n-4k+1)/(2m+2n-2k+1),

    with c = cos(eps).  The bare sum is the unweighted overlap S_mn; the
    (m + 1/2) factor turns it into K_mn and is checked against quadrature in
    the tests.
    """
    _check_angle(eps)
    a = a_sequence(m + n)
    c = math.cos(eps)
    total = 0.0
    for k in range(min(m, n) + 1):
        s = m + n - 2 * k
        b = a[k] * a[m - k] * a[n - k] / a[m + n - k] * (2 * s + 1) / (2 * m + 2 * n - 2 * k + 1)
        total += b * (legendre_p(s - 1, c) - legendre_p(s + 1, c)) / (2 * s + 1)
    return (m + 0.5) * total


def reduced_matrix(n_max, angles):
    """M_mn = (K_mn - K_m0 K_0n / K_00) / m for m, n = 1..n_max."""
    s = overlap_matrix(n_max, angles)
    t = s[1:, 1:] - np.outer(s[1:, 0], s[0, 1:]) / s[0, 0]
    m = np.arange(1, n_max + 1)
    return ((m + 0.5) / m)[:, None] * t, t


@dataclass(frozen=True)
class OracleResult:
    """SN eigenvalues sigma (ascending) of the Legendre-matrix truncation."""

    eigenvalues: tuple
    n_max: int
    patch_angles: tuple
    patch_chords: tuple
    residuals: dict = field(default_factory=dict)

    def record(self):
        return {
            "n_max": self.n_max,
            "patch_angles": list(self.patch_angles),
            "patch_chords": list(self.patch_chords),
            "eigenvalues": list(self.eigenvalues),
            **self.residuals,
        }


SOLVERS = ("nonsymmetric", "symmetric")


def _symmetric_top(t, n_eigs):
    n = t.shape[0]
    m = np.arange(1, n + 1)
    sd = np.sqrt((m + 0.5) / m)
    sym = sd[:, None] * t * sd[None, :]
    vals, vecs = linalg.eigh(sym, subset_by_index=[n - n_eigs, n - 1])
    res = np.linalg.norm(sym @ vecs - vecs * vals, axis=0)
    return vals, res


def sn_oracle(patch_angles, n_max=1000, n_eigs=5, solver="nonsymmetric", symmetric_check=True):
    """Smallest ``n_eigs`` SN eigenvalues for polar patches of the given angles.

    The dense nonsymmetric eigenproblem of M gives 1/lambda; eigenvalues with
    |imag| > 1e-8 or nonpositive real part are discarded and sigma = eps lambda,
    eps being the first patch angle.  M is similar to the symmetric matrix
    sqrt(Dg) T sqrt(Dg), which is solved independently as a check, or alone
    when ``solver="symmetric"`` (much faster at large n_max).
    """
    angles = _angles(patch_angles)
    if solver not in SOLVERS:
        raise ConfigError(f"solver must be one of {SOLVERS}")
    if int(n_max) < MIN_NMAX:
        raise ConfigError(f"n_max must be at least {MIN_NMAX}")
    if not 1 <= n_eigs <= n_max:
        raise ConfigError("n_eigs must lie in [1, n_max]")
    n_max = int(n_max)
    eps = angles[0]
    mat, t = reduced_matrix(n_max, angles)
    diag = {"solver": solver}
    if solver == "symmetric":
        vals, res = _symmetric_top(t, n_eigs)
        if np.any(vals <= 0.0):
            raise ConvergenceError("nonpositive eigenvalue among the requested ones")
        sigma = np.sort(eps / vals)
        diag["max_residual"] = float(res.max())
    else:
        try:
            inv = linalg.eigvals(mat, overwrite_a=True, check_finite=False)
        except linalg.LinAlgError as exc:
            raise ConvergenceError(f"eigen-solve failed: {exc}") from exc
        keep = np.abs(inv.imag) <= IMAG_TOLERANCE
        inv = inv.real[keep]
        inv = inv[inv > 0.0]
        if inv.size < n_eigs:
            raise ConvergenceError(f"only {inv.size} real positive eigenvalues for n_eigs={n_eigs}")
        sigma = np.sort(eps / inv)[:n_eigs]
        diag["n_discarded"] = int(n_max - inv.size)
        if symmetric_check:
            vals, res = _symmetric_top(t, n_eigs)
            diag["symmetric_gap"] = float(np.max(np.abs(np.sort(eps / vals) - sigma)))
            diag["max_residual"] = float(res.max())
    chords = tuple(2.0 * math.sin(a / 2.0) for a in angles)
    return OracleResult(tuple(float(s) for s in sigma), n_max, angles, chords, diag)
