"""Local exterior Steklov problem on a flat disk patch and the patch quantities
derived from it: reactive capacitance C(kappa), its derivative, the charge
density q(r; kappa), the monopole coefficient E(kappa) and the zeros of
C(-sigma).

The axisymmetric eigenproblem

    int_0^a k(r, r') psi(r') r' dr' = psi(r) / mu,
    k(r, r') = 2 / (pi (r + r')) * K(2 sqrt(r r') / (r + r')),

is discretized by Nystrom product integration on a grid clustered at both
ends of [0, a].  The kernel carries a logarithmic singularity on the
diagonal; it is split off and integrated exactly against piecewise-linear
hat functions (see ``_kernels.nystrom_matrix``).

Reactivity ``math.inf`` is the perfectly reactive (Dirichlet) limit and is
handled exactly rather than as a large number.
"""

from __future__ import annotations

import json
import logging
import math
import os
import warnings
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path

import numpy as np
from scipy import integrate, linalg, optimize
from scipy.spatial.distance import pdist
from shapely.geometry import LinearRing

from . import _kernels
from .errors import BracketError, ConfigError, ConvergenceError, PoleError
from .specfun import elliptic_e

log = logging.getLogger(__name__)

INF = math.inf
EULER_GAMMA = 0.57721566490153286061
POLE_TOLERANCE = 1e-6  # relative to mu_0
SERIALIZATION_VERSION = 1
DEFAULT_N_MODES = 64
DEFAULT_N_QUAD = 800
E_STEP = 1e-4
KAPPA_ACCURACY_CAP = 500.0


class AccuracyWarning(UserWarning):
    """An approximation is being used outside its stated validity range."""


def parse_reactivity(value):
    """Float reactivity from a number or the literal string ``"inf"``."""
    if isinstance(value, str):
        text = value.strip().lower()
        if text in ("inf", "+inf", "infinity", "dirichlet"):
            return INF
        try:
            value = float(text)
        except ValueError as exc:
            raise ConfigError(f"cannot parse reactivity {value!r}") from exc
    value = float(value)
    if math.isnan(value) or value == -INF:
        raise ConfigError(f"invalid reactivity {value!r}")
    return value


def format_reactivity(value):
    return "inf" if math.isinf(value) else repr(float(value))


def is_dirichlet(kappa):
    return math.isinf(kappa) and kappa > 0


# ---------------------------------------------------------------------------
# spectrum
# ---------------------------------------------------------------------------


def unit_grid(n_quad):
    """Nodes on [0, 1] clustered at the centre and at the rim."""
    t = np.arange(n_quad) / (n_quad - 1)
    r = 0.5 * (1.0 - np.cos(np.pi * t))
    r[0] = 0.0
    r[-1] = 1.0
    return r


def _trapezoid_weights(r):
    w = np.zeros_like(r)
    h = np.diff(r)
    w[:-1] += 0.5 * h
    w[1:] += 0.5 * h
    return w


@dataclass(frozen=True, eq=False)
class DiskSteklovSpectrum:
    """Axisymmetric local Steklov eigenpairs of a disk of radius ``radius``.

    Arrays are stored for the unit disk; the public properties apply the
    dilation rules mu -> mu / a, d -> a d, psi(r) -> psi(r / a) / a.
    """

    radius: float
    mu_unit: np.ndarray
    d_unit: np.ndarray
    psi_unit: np.ndarray  # (n_modes, n_quad) samples on grid_unit
    grid_unit: np.ndarray
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def n_modes(self):
        return self.mu_unit.size

    @property
    def n_quad(self):
        return self.grid_unit.size

    @property
    def mu(self):
        return self.mu_unit / self.radius

    @property
    def d(self):
        return self.d_unit * self.radius

    @property
    def grid(self):
        return self.grid_unit * self.radius

    @property
    def psi(self):
        return self.psi_unit / self.radius

    @property
    def area(self):
        return math.pi * self.radius**2

    def rescaled(self, radius):
        """Same unit-disk data viewed at another radius (shares caches)."""
        if not radius > 0:
            raise ConfigError("radius must be positive")
        return DiskSteklovSpectrum(
            float(radius), self.mu_unit, self.d_unit, self.psi_unit, self.grid_unit, self._cache
        )

    def psi_unit_at(self, x):
        """Unit-disk eigenfunctions at points x in [0, 1], shape (n_modes, len(x)).

        Uses the Nystrom interpolant psi(x) = mu int k(x, r') psi(r') r' dr'.
        """
        x = np.atleast_1d(np.asarray(x, dtype=float))
        if np.any(x < 0.0) or np.any(x > 1.0 + 1e-12):
            raise ConfigError("eigenfunction samples requested outside the patch")
        a_mat = _kernels.nystrom_matrix(np.minimum(x, 1.0), self.grid_unit)
        return (a_mat @ self.psi_unit.T).T * self.mu_unit[:, None]

    def psi_at(self, r):
        """psi_k(r) for the patch of radius ``radius``."""
        r = np.atleast_1d(np.asarray(r, dtype=float))
        return self.psi_unit_at(r / self.radius) / self.radius

    def _node_matrix(self):
        if "nodes" not in self._cache:
            self._cache["nodes"] = _kernels.nystrom_matrix(self.grid_unit, self.grid_unit)
        return self._cache["nodes"]

    def _egrid_matrix(self, n_steps):
        key = ("egrid", n_steps)
        if key not in self._cache:
            x = np.linspace(0.0, 1.0, n_steps + 1)
            self._cache[key] = (x, _kernels.nystrom_matrix(x, self.grid_unit))
        return self._cache[key]

    def _egrid_psi(self, n_steps):
        key = ("egrid_psi", n_steps)
        if key not in self._cache:
            x, a_mat = self._egrid_matrix(n_steps)
            self._cache[key] = (x, (a_mat @ self.psi_unit.T).T * self.mu_unit[:, None])
        return self._cache[key]

    def robin_nodes(self, mu_arg):
        """Unit-disk w at the nodes from (I + mu A) w = mu A 1, all modes included."""
        key = ("robin", float(mu_arg))
        if key not in self._cache:
            a_mat = self._node_matrix()
            n = a_mat.shape[0]
            rhs = mu_arg * a_mat.sum(axis=1)
            self._cache[key] = linalg.solve(np.eye(n) + mu_arg * a_mat, rhs)
            if len(self._cache) > 64:
                self._cache.pop(next(k for k in self._cache if k[0] == "robin"))
        return self._cache[key]

    # -- serialization -----------------------------------------------------

    def to_text(self):
        """Versioned JSON text; floats stored as hex strings for bit-exactness."""

        def hexlist(arr):
            return [float(v).hex() for v in np.ravel(arr)]

        payload = {
            "format": "reactpatch-disk-spectrum",
            "version": SERIALIZATION_VERSION,
            "radius": float(self.radius).hex(),
            "n_modes": self.n_modes,
            "n_quad": self.n_quad,
            "mu_unit": hexlist(self.mu_unit),
            "d_unit": hexlist(self.d_unit),
            "grid_unit": hexlist(self.grid_unit),
            "psi_unit": hexlist(self.psi_unit),
        }
        return json.dumps(payload, indent=1)

    @classmethod
    def from_text(cls, text):
        try:
            payload = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"spectrum file is not valid JSON: {exc}") from exc
        if payload.get("format") != "reactpatch-disk-spectrum":
            raise ConfigError("not a disk spectrum file")
        if payload.get("version") != SERIALIZATION_VERSION:
            raise ConfigError(f"unsupported spectrum file version {payload.get('version')}")

        def unhex(values):
            return np.array([float.fromhex(v) for v in values], dtype=float)

        n_modes = int(payload["n_modes"])
        n_quad = int(payload["n_quad"])
        psi = unhex(payload["psi_unit"]).reshape(n_modes, n_quad)
        return cls(
            float.fromhex(payload["radius"]),
            unhex(payload["mu_unit"]),
            unhex(payload["d_unit"]),
            psi,
            unhex(payload["grid_unit"]),
        )

    def save(self, path):
        Path(path).write_text(self.to_text())

    @classmethod
    def load(cls, path):
        return cls.from_text(Path(path).read_text())


def solve_disk_spectrum(a=1.0, n_modes=DEFAULT_N_MODES, n_quad=DEFAULT_N_QUAD):
    """Solve the axisymmetric local Steklov problem for a disk of radius ``a``.

    Returns the ``n_modes`` smallest eigenvalues with weights
    d_k = 2 pi int psi_k r dr >= 0 and L2-normalized eigenfunctions
    (2 pi int psi_k^2 r dr = 1).
    """
    if not a > 0:
        raise ConfigError("patch radius must be positive")
    if int(n_modes) != n_modes or n_modes < 1:
        raise ConfigError("n_modes must be a positive integer")
    if int(n_quad) != n_quad or n_quad < 4 * n_modes:
        raise ConfigError("n_quad must be an integer >= 4 * n_modes")
    return _solve_unit(int(n_modes), int(n_quad)).rescaled(float(a))


@lru_cache(maxsize=8)
def _solve_unit(n_modes, n_quad):
    r = unit_grid(n_quad)
    a_mat = _kernels.nystrom_matrix(r, r)
    vals, vecs = linalg.eig(a_mat)
    order = np.argsort(-vals.real)[:n_modes]
    vals = vals[order]
    vecs = vecs[:, order]
    if np.any(vals.real <= 0.0) or np.any(np.abs(vals.imag) > 1e-8 * np.abs(vals.real)):
        raise ConvergenceError("eigen-solve did not return enough real positive eigenvalues")
    mu = 1.0 / vals.real
    vecs = vecs.real
    gaps = np.diff(mu) / mu[1:]
    if np.any(gaps < 1e-8):
        k = int(np.argmin(gaps))
        raise ConvergenceError(
            f"local Steklov eigenvalues {k} and {k + 1} are numerically degenerate"
        )
    tw = _trapezoid_weights(r) * r
    norms = 2.0 * np.pi * (tw[:, None] * vecs**2).sum(axis=0)
    vecs = vecs / np.sqrt(norms)
    d = 2.0 * np.pi * (tw @ vecs)
    sign = np.where(d < 0.0, -1.0, 1.0)
    vecs = vecs * sign
    d = np.abs(d)
    log.debug("solved unit-disk spectrum: n_modes=%d n_quad=%d mu0=%.8f", n_modes, n_quad, mu[0])
    return DiskSteklovSpectrum(1.0, mu, d, np.ascontiguousarray(vecs.T), r)


def cache_dir_from_env():
    value = os.environ.get("REACTPATCH_CACHE_DIR")
    return Path(value) if value else None


def cached_spectrum(a=1.0, n_modes=DEFAULT_N_MODES, n_quad=DEFAULT_N_QUAD, cache_dir=None):
    """Unit-disk solve loaded from / stored to ``cache_dir`` and rescaled to ``a``."""
    cache_dir = cache_dir if cache_dir is not None else cache_dir_from_env()
    if cache_dir is None:
        return solve_disk_spectrum(a, n_modes, n_quad)
    cache_dir = Path(cache_dir)
    path = cache_dir / f"disk_spectrum_m{n_modes}_q{n_quad}_v{SERIALIZATION_VERSION}.json"
    if path.exists():
        return DiskSteklovSpectrum.load(path).rescaled(a)
    spec = solve_disk_spectrum(1.0, n_modes, n_quad)
    cache_dir.mkdir(parents=True, exist_ok=True)
    tmp = path.with_suffix(".tmp")
    spec.save(tmp)
    tmp.replace(path)
    # reload so fresh and cached runs see identical bits
    return DiskSteklovSpectrum.load(path).rescaled(a)


# ---------------------------------------------------------------------------
# capacitance model
# ---------------------------------------------------------------------------

MODES = ("spectral", "sigmoidal", "taylor", "large_kappa")


@dataclass(frozen=True)
class CapacitanceModel:
    """Evaluator for C, C', q and E of one disk patch.

    ``mode`` selects the representation: the spectral series (reference), the
    sigmoidal closed form, the cubic Taylor polynomial, or the large-kappa
    asymptote.  q is only available in spectral mode.  The other modes pair C
    with a matching closed-form E (see ``monopole_E``).
    """

    spectrum: DiskSteklovSpectrum
    mode: str = "spectral"

    def __post_init__(self):
        if self.mode not in MODES:
            raise ConfigError(f"unknown capacitance mode {self.mode!r}; choose from {MODES}")

    @property
    def radius(self):
        return self.spectrum.radius

    def for_radius(self, a):
        return CapacitanceModel(self.spectrum.rescaled(a), self.mode)

    def with_mode(self, mode):
        return CapacitanceModel(self.spectrum, mode)

    def C(self, kappa):
        return capacitance(self, kappa)

    def dC(self, kappa):
        return capacitance_derivative(self, kappa)

    def E(self, kappa):
        return monopole_E(self, kappa)


def _check_pole(spec, kappa):
    if math.isinf(kappa):
        return
    dist = np.abs(kappa + spec.mu)
    k = int(np.argmin(dist))
    if dist[k] <= POLE_TOLERANCE * spec.mu[0] and spec.d[k] > 0.0:
        raise PoleError(f"kappa={kappa!r} is at the pole -mu_{k}={-spec.mu[k]:.10g}")
    if kappa < 0.0 and -kappa >= spec.mu[-1]:
        raise PoleError(
            f"kappa={kappa!r} lies beyond the last retained pole -mu_{spec.n_modes - 1}; "
            "increase n_modes"
        )


def _tail(spec):
    """One-pole closure for the truncated modes.

    Its weight is fixed exactly by the sum rule sum_k d_k^2 = |Gamma|; the pole
    sits at twice the first omitted eigenvalue, the weighted mean of mu_k for
    d_k^2 ~ k^-3 decay.
    """
    weight = max(spec.area - float(np.sum(spec.d**2)), 0.0)
    mu = spec.mu
    step = mu[-1] - mu[-2] if mu.size > 1 else math.pi / spec.radius
    return weight, 2.0 * (mu[-1] + step)


def _capacitance_spectral(spec, kappa):
    _check_pole(spec, kappa)
    mu, d2 = spec.mu, spec.d**2
    t_w, t_mu = _tail(spec)
    if is_dirichlet(kappa):
        return float((np.sum(mu * d2) + t_w * t_mu) / (2.0 * np.pi))
    return float(kappa / (2.0 * np.pi) * (np.sum(mu * d2 / (mu + kappa)) + t_w * t_mu / (t_mu + kappa)))


def _capacitance_derivative_spectral(spec, kappa):
    _check_pole(spec, kappa)
    if is_dirichlet(kappa):
        return 0.0
    mu, d2 = spec.mu, spec.d**2
    t_w, t_mu = _tail(spec)
    total = np.sum(mu**2 * d2 / (mu + kappa) ** 2) + t_w * t_mu**2 / (t_mu + kappa) ** 2
    return float(total / (2.0 * np.pi))


def capacitance(model, kappa):
    """Reactive capacitance C(kappa) = (kappa / 2 pi) sum mu_k d_k^2 / (mu_k + kappa)."""
    kappa = parse_reactivity(kappa)
    a = model.radius
    if model.mode == "spectral":
        return _capacitance_spectral(model.spectrum, kappa)
    if model.mode == "sigmoidal":
        return capacitance_sigmoidal(a, kappa)
    if model.mode == "taylor":
        return capacitance_taylor(a, disk_taylor_coeffs_exact(), kappa)
    return capacitance_large_kappa(a, kappa)


def capacitance_derivative(model, kappa):
    """C'(kappa) = (1 / 2 pi) sum mu_k^2 d_k^2 / (mu_k + kappa)^2 (strictly positive)."""
    kappa = parse_reactivity(kappa)
    if model.mode == "spectral":
        return _capacitance_derivative_spectral(model.spectrum, kappa)
    a = model.radius
    if is_dirichlet(kappa):
        return 0.0
    if model.mode == "sigmoidal":
        mu = kappa * a
        return 8.0 * a / (math.pi * mu + 4.0) ** 2 * a
    if model.mode == "taylor":
        c1, c2, c3 = disk_taylor_coeffs_exact()
        mu = kappa * a
        return a * a * (c1 - 2.0 * c2 * mu + 3.0 * c3 * mu * mu)
    mu = kappa * a
    return 2.0 * a * a * (math.log(mu) + math.log(2.0) + EULER_GAMMA) / (math.pi**2 * mu * mu)


def capacitance_sigmoidal(a, kappa):
    """a * C_app(kappa a) with C_app(mu) = 2 mu / (pi mu + 4)."""
    kappa = parse_reactivity(kappa)
    if kappa < 0:
        raise ConfigError("sigmoidal approximation requires kappa >= 0")
    if is_dirichlet(kappa):
        return 2.0 * a / math.pi
    mu = kappa * a
    return a * 2.0 * mu / (math.pi * mu + 4.0)


def disk_taylor_coeffs_exact():
    """(c1, c2, c3) for the disk: 1/2, 4/(3 pi), (4/pi^2) int_0^1 r E(r)^2 dr."""
    c3 = 4.0 / math.pi**2 * _int_r_e2()
    return 0.5, 4.0 / (3.0 * math.pi), c3


@lru_cache(maxsize=1)
def _int_r_e2():
    val, _ = integrate.quad(lambda r: r * elliptic_e(r) ** 2, 0.0, 1.0, epsabs=1e-13, epsrel=1e-12)
    return val


def disk_taylor_coeffs_quadrature():
    """(c1, c2, c3) of the disk from elliptic-integral quadratures alone."""
    c2_int, _ = integrate.quad(lambda r: r * elliptic_e(r), 0.0, 1.0, epsabs=1e-13, epsrel=1e-12)
    return 0.5, 2.0 / math.pi * c2_int, 4.0 / math.pi**2 * _int_r_e2()


def taylor_coeffs(model, n):
    """c_1..c_n with c_j = (2 pi a^(j+1))^-1 sum_k d_k^2 / mu_k^(j-1)."""
    if n < 1:
        raise ConfigError("need at least one Taylor coefficient")
    spec = model.spectrum
    a = spec.radius
    d2, mu = spec.d**2, spec.mu
    t_w, t_mu = _tail(spec)
    out = []
    for j in range(1, n + 1):
        total = np.sum(d2 / mu ** (j - 1)) + t_w / t_mu ** (j - 1)
        out.append(float(total / (2.0 * np.pi * a ** (j + 1))))
    return out


def capacitance_taylor(a, coeffs, kappa):
    """a * sum_j c_j (-1)^(j+1) (kappa a)^j using the supplied c_1, c_2, ..."""
    kappa = parse_reactivity(kappa)
    if is_dirichlet(kappa):
        raise ConfigError("Taylor approximation is undefined at kappa = inf")
    mu = kappa * a
    if abs(mu) >= 0.45:
        warnings.warn(
            f"Taylor capacitance used at kappa*a={mu:.3g}, outside 0 < kappa*a < 0.45",
            AccuracyWarning,
            stacklevel=2,
        )
    return -a * sum(c * (-mu) ** (j + 1) for j, c in enumerate(coeffs))


def capacitance_large_kappa(a, kappa):
    """2a/pi - 2a (log(kappa a) + log 2 + gamma + 1) / (pi^2 kappa a)."""
    kappa = parse_reactivity(kappa)
    if is_dirichlet(kappa):
        return 2.0 * a / math.pi
    mu = kappa * a
    if not mu > 0:
        raise ConfigError("large-kappa asymptote requires kappa > 0")
    if mu <= 10.0:
        warnings.warn(
            f"large-kappa asymptote used at kappa*a={mu:.3g} <= 10", AccuracyWarning, stacklevel=2
        )
    return 2.0 * a / math.pi - 2.0 * a * (math.log(mu) + math.log(2.0) + EULER_GAMMA + 1.0) / (
        math.pi**2 * mu
    )


# ---------------------------------------------------------------------------
# patch fields: w, w_c, q
# ---------------------------------------------------------------------------


def _omega(a, r):
    """int_Gamma dy' / (2 pi |y - y'|) for the disk: (2a/pi) E(r/a)."""
    return 2.0 * a / math.pi * elliptic_e(np.clip(np.asarray(r, dtype=float) / a, 0.0, 1.0))


def _check_radii(spec, r):
    r = np.atleast_1d(np.asarray(r, dtype=float))
    if np.any(r < 0.0) or np.any(r > spec.radius * (1.0 + 1e-12)):
        raise ConfigError("radial position must satisfy 0 <= r <= a")
    return r


def _require_spectral(model, what):
    if model.mode != "spectral":
        raise ConfigError(f"{what} requires a spectral capacitance model")


def patch_solution_w(model, kappa, r):
    """w(r; kappa) = kappa sum d_k psi_k(r) / (mu_k + kappa) on the patch.

    Evaluated as kappa [omega(r) - kappa sum d_k psi_k / (mu_k (mu_k + kappa))],
    which converges faster; kappa = inf gives w = 1 identically.
    """
    _require_spectral(model, "patch_solution_w")
    kappa = parse_reactivity(kappa)
    spec = model.spectrum
    r = _check_radii(spec, r)
    if is_dirichlet(kappa):
        return np.ones_like(r)
    _check_pole(spec, kappa)
    psi = spec.psi_at(r)
    coef = spec.d / (spec.mu * (spec.mu + kappa))
    return kappa * (_omega(spec.radius, r) - kappa * (coef @ psi))


def patch_solution_wc(model, sigma, r):
    """w_c(r; -sigma) = d/dsigma w(r; -sigma) = -sum mu_k d_k psi_k / (mu_k - sigma)^2."""
    _require_spectral(model, "patch_solution_wc")
    sigma = float(sigma)
    spec = model.spectrum
    r = _check_radii(spec, r)
    _check_pole(spec, -sigma)
    psi = spec.psi_at(r)
    mu, d = spec.mu, spec.d
    s1 = (d / (mu * (mu - sigma))) @ psi
    s2 = (d / (mu * (mu - sigma) ** 2)) @ psi
    return -_omega(spec.radius, r) - 2.0 * sigma * s1 - sigma**2 * s2


def _q_from_psi(a, mu, d, psi, omega, kappa):
    return 0.5 * kappa * (1.0 - kappa * (omega - kappa * ((d / (mu * (mu + kappa))) @ psi)))


DIRECT_THRESHOLD = 20.0
DIRECT_ACCURACY_CAP = 1e5
Q_METHODS = ("auto", "series", "direct")


def _resolve_method(method, mu_arg):
    if method not in Q_METHODS:
        raise ConfigError(f"unknown charge-density method {method!r}; choose from {Q_METHODS}")
    if method == "auto":
        return "series" if mu_arg <= DIRECT_THRESHOLD else "direct"
    return method


def _warn_accuracy(method, mu_arg):
    cap = KAPPA_ACCURACY_CAP if method == "series" else DIRECT_ACCURACY_CAP
    if mu_arg > cap:
        warnings.warn(
            f"{method} charge density loses accuracy for kappa*a={mu_arg:.3g} > {cap:g}",
            AccuracyWarning,
            stacklevel=3,
        )


def _q_unit_direct(unit, mu_arg, a_rows):
    """q on the unit disk from the Robin solve: q = (mu/2)(1 - mu A(1 - w))."""
    w_nodes = unit.robin_nodes(mu_arg)
    w = mu_arg * (a_rows @ (1.0 - w_nodes))
    return 0.5 * mu_arg * (1.0 - w)


def charge_density(model, kappa, r, method="auto"):
    """q(r; kappa) = (1/2) dw/dn on the patch.

    ``series`` uses the doubly subtracted eigenfunction expansion; ``direct``
    solves the Robin integral equation (I + kappa A) w = kappa A 1 on the
    Nystrom grid, which keeps every mode and stays accurate at large kappa.
    ``auto`` picks the series for kappa*a <= 20.
    """
    _require_spectral(model, "charge_density")
    kappa = parse_reactivity(kappa)
    spec = model.spectrum
    a = spec.radius
    r = _check_radii(spec, r)
    if is_dirichlet(kappa):
        if np.any(r >= a):
            raise ConfigError("the kappa = inf charge density is singular at the rim")
        return 1.0 / (math.pi * np.sqrt(a * a - r * r))
    _check_pole(spec, kappa)
    mu_arg = kappa * a
    method = _resolve_method(method, mu_arg)
    _warn_accuracy(method, mu_arg)
    if method == "series":
        psi = spec.psi_at(r)
        return _q_from_psi(a, spec.mu, spec.d, psi, _omega(a, r), kappa)
    unit = spec.rescaled(1.0)
    rows = _kernels.nystrom_matrix(np.minimum(r / a, 1.0), unit.grid_unit)
    return _q_unit_direct(unit, mu_arg, rows) / a


# ---------------------------------------------------------------------------
# monopole coefficient E
# ---------------------------------------------------------------------------


def _curly_e_unit(spec, mu_arg, dr=E_STEP, method="auto"):
    """2 int_0^1 (1/rho) (int_0^rho q(eta) eta d eta)^2 d rho for the unit disk."""
    n_steps = int(round(1.0 / dr))
    if is_dirichlet(mu_arg):
        x = np.linspace(0.0, 1.0, n_steps + 1)
        inner = (1.0 - np.sqrt(np.clip(1.0 - x * x, 0.0, None))) / math.pi
    else:
        unit = spec.rescaled(1.0)
        _check_pole(unit, mu_arg)
        method = _resolve_method(method, mu_arg)
        _warn_accuracy(method, mu_arg)
        if method == "series":
            x, psi = unit._egrid_psi(n_steps)
            omega = 2.0 / math.pi * elliptic_e(x)
            q = _q_from_psi(1.0, unit.mu, unit.d, psi, omega, mu_arg)
        else:
            x, rows = unit._egrid_matrix(n_steps)
            q = _q_unit_direct(unit, mu_arg, rows)
        inner = integrate.cumulative_trapezoid(q * x, x, initial=0.0)
    integrand = np.zeros_like(x)
    integrand[1:] = inner[1:] ** 2 / x[1:]
    return 2.0 * integrate.trapezoid(integrand, x)


def monopole_E(model, kappa, dr=E_STEP, method="auto"):
    """E(kappa) = -(log a / 2) C(kappa)^2 + a^2 curlyE(kappa a).

    curlyE is the nested radial quadrature on the unit disk with trapezoid
    step ``dr``, fed by ``charge_density`` with the given ``method``.  In
    sigmoidal mode the heuristic E^app is returned instead; the Taylor and
    large-kappa modes use the limiting ratios E / C^2 of a unit disk.
    """
    kappa = parse_reactivity(kappa)
    a = model.radius
    if model.mode == "sigmoidal":
        return monopole_E_heuristic(a, kappa)
    if model.mode == "taylor":
        # small-kappa limit: curlyE -> C^2 / 8 for a uniform flux
        c = capacitance(model, kappa)
        return c * c * (0.125 - 0.5 * math.log(a))
    if model.mode == "large_kappa":
        c = capacitance(model, kappa)
        return c * c * ((3.0 - 4.0 * math.log(2.0)) / 4.0 - 0.5 * math.log(a))
    c = capacitance(model, kappa)
    mu_arg = kappa if is_dirichlet(kappa) else kappa * a
    return -0.5 * math.log(a) * c * c + a * a * _curly_e_unit(model.spectrum, mu_arg, dr, method)


def patch_C_E(model, kappa):
    """(C, E) of one patch, exact closed forms when kappa = inf."""
    kappa = parse_reactivity(kappa)
    a = model.radius
    if is_dirichlet(kappa):
        return 2.0 * a / math.pi, monopole_E_dirichlet(a)
    return capacitance(model, kappa), monopole_E(model, kappa)


def monopole_E_dirichlet(a):
    """Closed-form E(inf) = -(2a^2/pi^2)(log a + log 4 - 3/2)."""
    return -2.0 * a * a / math.pi**2 * (math.log(a) + math.log(4.0) - 1.5)


def monopole_E_heuristic(a, kappa):
    """E_app = -(a^2 log a / 2) C_app^2 + a^2 C_app^2 (3/4 - log 2 + 1/(1/(log 2 - 5/8) + 5.17 mu^0.81))."""
    kappa = parse_reactivity(kappa)
    if kappa < 0:
        raise ConfigError("heuristic E requires kappa >= 0")
    if is_dirichlet(kappa):
        c_app = 2.0 / math.pi
        ratio = 0.75 - math.log(2.0)
    else:
        mu = kappa * a
        c_app = 2.0 * mu / (math.pi * mu + 4.0)
        ratio = 0.75 - math.log(2.0) + 1.0 / (1.0 / (math.log(2.0) - 0.625) + 5.17 * mu**0.81)
    return -0.5 * a * a * math.log(a) * c_app**2 + a * a * c_app**2 * ratio


def monopole_J(model, k):
    """(4 pi^3 / d_k^2) int_0^1 (1/rho) (int_0^rho eta psi_k(eta) d eta)^2 d rho.

    Computed on the unit disk with the same nested trapezoid rule as E; enters
    the near-resonant Steklov-Neumann correction.
    """
    _require_spectral(model, "monopole_J")
    unit = model.spectrum.rescaled(1.0)
    n_steps = int(round(1.0 / E_STEP))
    x, psi = unit._egrid_psi(n_steps)
    dk = unit.d[k]
    if dk == 0.0:
        raise ConfigError(f"mode {k} has zero weight")
    inner = integrate.cumulative_trapezoid(psi[k] * x, x, initial=0.0)
    integrand = np.zeros_like(x)
    integrand[1:] = inner[1:] ** 2 / x[1:]
    return 4.0 * math.pi**3 / dk**2 * integrate.trapezoid(integrand, x)


# ---------------------------------------------------------------------------
# zeros of C(-sigma)
# ---------------------------------------------------------------------------


def _bisect_between(fun, lo, hi, what, xtol=1e-11, min_offset=0.0):
    """Bisect on [lo + d, hi - d] with d = max(1e-6 gap, min_offset)."""
    gap = hi - lo
    offset = max(1e-6 * gap, min_offset)
    left = lo + offset
    right = hi - offset
    f_left, f_right = fun(left), fun(right)
    if not (np.isfinite(f_left) and np.isfinite(f_right)) or f_left * f_right > 0:
        raise BracketError(f"{what}: no sign change on [{left:.10g}, {right:.10g}]")
    return optimize.bisect(fun, left, right, xtol=xtol, maxiter=200)


def pole_offset(spec):
    """Smallest safe distance of a bracket endpoint from a pole."""
    return 2.0 * POLE_TOLERANCE * float(spec.mu[0])


def neumann_zeros(model, k_max):
    """mu_0^N = 0 and, for k = 1..k_max, the zero of C(-sigma) in (mu_{k-1}, mu_k)."""
    _require_spectral(model, "neumann_zeros")
    spec = model.spectrum
    if k_max >= spec.n_modes:
        raise BracketError(
            f"k_max={k_max} needs at least {k_max + 1} modes; spectrum has {spec.n_modes}"
        )
    zeros = [0.0]
    mu = spec.mu
    for k in range(1, k_max + 1):
        zeros.append(
            _bisect_between(
                lambda s: _capacitance_spectral(spec, -s),
                mu[k - 1],
                mu[k],
                f"Neumann zero {k}",
                min_offset=pole_offset(spec),
            )
        )
    return np.array(zeros)


# ---------------------------------------------------------------------------
# arbitrary flat patch
# ---------------------------------------------------------------------------


def _omega_polygon(points, verts):
    """omega(y) = -(1/2 pi) sum_edges n.(y - y') int ds' / |y - y'| (exact per edge)."""
    p0 = verts
    p1 = np.roll(verts, -1, axis=0)
    edge = p1 - p0
    length = np.hypot(edge[:, 0], edge[:, 1])
    tang = edge / length[:, None]
    normal = np.stack([tang[:, 1], -tang[:, 0]], axis=1)  # outward for CCW
    out = np.zeros(len(points))
    for start in range(0, len(points), 2048):
        y = points[start : start + 2048]
        rel = y[:, None, :] - p0[None, :, :]
        h = rel[..., 0] * normal[None, :, 0] + rel[..., 1] * normal[None, :, 1]
        s0 = rel[..., 0] * tang[None, :, 0] + rel[..., 1] * tang[None, :, 1]
        ah = np.abs(h)
        with np.errstate(divide="ignore", invalid="ignore"):
            term = h * (np.arcsinh((length[None, :] - s0) / ah) - np.arcsinh(-s0 / ah))
        term = np.where(ah > 0.0, term, 0.0)
        out[start : start + 2048] = -term.sum(axis=1) / (2.0 * np.pi)
    return out


def geometric_coeffs_arbitrary(boundary, n_radial=24, n_angular=6):
    """(area, c2, c3) of a flat patch bounded by a simple closed polyline.

    c2 = (2 pi a^3)^-1 int omega and c3 = (2 pi a^4)^-1 int omega^2 with a the
    half-diameter.  omega is evaluated exactly edge by edge; the area integrals
    use a signed fan of Gauss product rules about the vertex centroid, valid
    for any simple polygon.
    """
    verts = np.asarray(boundary, dtype=float)
    if verts.ndim != 2 or verts.shape[1] != 2 or len(verts) < 3:
        raise ConfigError("boundary must be an (n >= 3, 2) array of vertices")
    if np.allclose(verts[0], verts[-1]):
        verts = verts[:-1]
    if not LinearRing(verts).is_simple:
        raise ConfigError("boundary polyline self-intersects")
    x, y = verts[:, 0], verts[:, 1]
    signed = 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))
    if signed < 0:
        verts = verts[::-1]
        signed = -signed
    area = signed
    a = 0.5 * float(np.max(pdist(verts)))

    centre = verts.mean(axis=0)
    gu, wu = np.polynomial.legendre.leggauss(n_radial)
    gt, wt = np.polynomial.legendre.leggauss(n_angular)
    u = 0.5 * (gu + 1.0)
    wu = 0.5 * wu
    t = 0.5 * (gt + 1.0)
    wt = 0.5 * wt
    v0 = verts - centre
    v1 = np.roll(verts, -1, axis=0) - centre
    jac = v0[:, 0] * v1[:, 1] - v0[:, 1] * v1[:, 0]  # twice the signed triangle area
    edge_pts = v0[:, None, :] + t[None, :, None] * (v1 - v0)[:, None, :]
    pts = centre + u[None, None, :, None] * edge_pts[:, :, None, :]
    weights = jac[:, None, None] * wt[None, :, None] * (wu * u)[None, None, :]
    omega = _omega_polygon(pts.reshape(-1, 2), verts).reshape(weights.shape)
    int_omega = float(np.sum(weights * omega))
    int_omega2 = float(np.sum(weights * omega**2))
    return area, int_omega / (2.0 * np.pi * a**3), int_omega2 / (2.0 * np.pi * a**4)
