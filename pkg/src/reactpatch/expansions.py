"""Small-patch expansions on the unit sphere: the mean first-reaction time
(MFRT), splitting probabilities, the principal Robin-Laplacian eigenvalue,
the moderate-reactivity MFRT, boundary homogenization and the two-term MFRT
of a general smooth domain.

Every expansion is returned as an ``ExpansionResult``: an ordered list of
terms, each a coefficient times a named gauge function of epsilon.  Nothing
outside the listed terms enters ``evaluate``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .disk_steklov import (
    AccuracyWarning,
    CapacitanceModel,
    is_dirichlet,
    parse_reactivity,
    disk_taylor_coeffs_exact,
    patch_C_E,
)
from .errors import ConfigError, DomainError, ValidityError
from .sphere_geometry import green_matrix, green_matrix_from_centers, green_s

BALL_VOLUME = 4.0 * math.pi / 3.0
DISK_E_RATIO_SMALL = 0.125
B1_UNIFORM = -0.5
B1_DEFECT = -0.5523
DILUTE_WARN_FRACTION = 0.2

GAUGES = {
    "eps^-2": lambda e: e**-2,
    "eps^-1": lambda e: 1.0 / e,
    "1": lambda e: 1.0,
    "eps": lambda e: e,
    "eps^2": lambda e: e * e,
    "log(eps/2)": lambda e: math.log(e / 2.0),
    "log(2/eps)": lambda e: math.log(2.0 / e),
    "eps*log(eps/2)": lambda e: e * math.log(e / 2.0),
    "eps*log(eps)": lambda e: e * math.log(e),
    "eps^2*log(eps/2)": lambda e: e * e * math.log(e / 2.0),
}


@dataclass(frozen=True)
class Term:
    label: str
    gauge: str
    coefficient: float

    def __post_init__(self):
        if self.gauge not in GAUGES:
            raise ConfigError(f"unknown gauge {self.gauge!r}")

    def value(self, eps):
        return self.coefficient * GAUGES[self.gauge](eps)


@dataclass(frozen=True)
class ExpansionResult:
    """Ordered asymptotic terms plus the patch data they were built from."""

    kind: str
    terms: tuple
    C: tuple = ()
    E: tuple = ()
    flags: tuple = ()
    extra: dict = field(default_factory=dict)

    def term(self, label):
        for t in self.terms:
            if t.label == label:
                return t
        raise KeyError(label)

    def coefficient(self, label):
        return self.term(label).coefficient

    def evaluate(self, eps, n_terms=None):
        """Sum of the first ``n_terms`` terms (all by default) at epsilon."""
        if not eps > 0:
            raise DomainError("epsilon must be positive")
        terms = self.terms if n_terms is None else self.terms[:n_terms]
        return float(sum(t.value(eps) for t in terms))

    def records(self):
        return [
            {"kind": self.kind, "label": t.label, "gauge": t.gauge, "coefficient": t.coefficient}
            for t in self.terms
        ]


# ---------------------------------------------------------------------------
# patch data
# ---------------------------------------------------------------------------


def _models_for(layout, models):
    n = layout.n_patches
    if isinstance(models, CapacitanceModel):
        models = [models] * n
    models = list(models)
    if len(models) != n:
        raise ConfigError(f"{n} patches but {len(models)} capacitance models")
    return [m.for_radius(a) if abs(m.radius - a) > 0 else m for m, a in zip(models, layout.radii)]


def patch_coefficients(layout, models):
    """(C, E) arrays over the patches, exact at kappa = inf."""
    ce = [patch_C_E(m, k) for m, k in zip(_models_for(layout, models), layout.reactivities)]
    return np.array([c for c, _ in ce]), np.array([e for _, e in ce])


def _green_form(g, c):
    return float(c @ g @ c)


# ---------------------------------------------------------------------------
# MFRT
# ---------------------------------------------------------------------------


def mfrt_from_CE(C, E, G):
    """MFRT coefficients from capacitances C, monopoles E and Green's matrix G.

    Terms of u_bar: U0/eps + U10 log(eps/2) + U11 with
    U0 = 2/(3 Cbar), U10/U0 = -C.C/(2 Cbar), U11/U0 = (2 pi/Cbar) C.G.C + Ebar/Cbar.
    """
    C = np.asarray(C, dtype=float)
    E = np.asarray(E, dtype=float)
    cbar = float(C.sum())
    if not cbar > 0:
        raise DomainError("MFRT needs at least one reactive patch (sum of C must be positive)")
    u0 = 2.0 / (3.0 * cbar)
    r10 = -float(C @ C) / (2.0 * cbar)
    r11 = 2.0 * math.pi / cbar * _green_form(G, C) + float(E.sum()) / cbar
    return ExpansionResult(
        "mfrt",
        (
            Term("leading", "eps^-1", u0),
            Term("log", "log(eps/2)", u0 * r10),
            Term("constant", "1", u0 * r11),
        ),
        C=tuple(C),
        E=tuple(E),
        extra={"U0": u0, "U10/U0": r10, "U11/U0": r11},
    )


def mfrt_coeffs(layout, models):
    """Three-term volume-averaged MFRT for the patches of ``layout``."""
    C, E = patch_coefficients(layout, models)
    res = mfrt_from_CE(C, E, green_matrix(layout))
    return _with_extra(res, centers=layout.centers)


def _with_extra(res, **kw):
    extra = dict(res.extra)
    extra.update(kw)
    return ExpansionResult(res.kind, res.terms, res.C, res.E, res.flags, extra)


def mfrt_field(result, layout, x, epsilon):
    """Outer MFRT u(x) through O(eps), plus the eps^2 log(eps/2) spatial term.

    The constant U2 of that last term is undetermined at this order; it is
    set to zero and the returned flag ``"U2_undetermined"`` says so.
    Returns (value, flags).
    """
    if result.kind != "mfrt":
        raise ConfigError("mfrt_field needs an mfrt result")
    x = np.asarray(x, dtype=float)
    if np.linalg.norm(x) > 1.0 + 1e-12:
        raise DomainError("x must lie in the closed unit ball")
    dist = np.linalg.norm(layout.centers - x, axis=1)
    if np.any(dist <= 3.0 * epsilon):
        raise DomainError("x is within 3 epsilon of a patch center; outer expansion invalid")
    C = np.asarray(result.C)
    g = np.array([green_s(x, xj) for xj in layout.centers])
    u0 = result.extra["U0"]
    r10 = result.extra["U10/U0"]
    r11 = result.extra["U11/U0"]
    u2_ratio = 0.0
    L = math.log(epsilon / 2.0)
    bracket = (
        1.0
        + epsilon * L * r10
        + epsilon * (r11 - 2.0 * math.pi * float(C @ g))
        + epsilon**2 * L * (u2_ratio - 2.0 * math.pi * float((C * (C / 2.0 + r10)) @ g))
    )
    return u0 / epsilon * bracket, ("U2_undetermined",)


@dataclass(frozen=True)
class DimensionalScales:
    """Conversion between dimensional and scaled variables.

    ``R`` sphere radius, ``D`` diffusivity, ``epsilon`` the patch scale, so the
    common patch length is L = epsilon R.  Reactivities map as kappa = L K / D,
    times as T = (R^2 / D) t, and a scaled surface rate k as K = (D / R) k.
    """

    R: float
    D: float
    epsilon: float

    def __post_init__(self):
        if not (self.R > 0 and self.D > 0 and self.epsilon > 0):
            raise DomainError("R, D and epsilon must be positive")

    @property
    def L(self):
        return self.epsilon * self.R

    @property
    def time(self):
        return self.R**2 / self.D

    @property
    def volume(self):
        return 4.0 * math.pi * self.R**3 / 3.0

    @property
    def surface(self):
        return 4.0 * math.pi * self.R**2

    def kappa(self, reactivity):
        k = parse_reactivity(reactivity)
        return k if is_dirichlet(k) else self.L * k / self.D

    def surface_rate(self, k):
        return self.D / self.R * k


def mfrt_dimensional(layout, models, R, D, reactivities):
    """Dimensional volume-averaged MFRT (R^2/D) u_bar(epsilon) for dimensional
    patch reactivities, converted with kappa_i = L K_i / D."""
    sc = DimensionalScales(R, D, layout.epsilon)
    lay = layout.with_reactivities([sc.kappa(k) for k in reactivities])
    return sc.time * mfrt_coeffs(lay, models).evaluate(layout.epsilon)


def mfrt_moderate_reactivity(centers, radii, reactivities, R, D, c2=None, c3=None, e=None):
    """Four-term MFRT for finite dimensional reactivities K_i.

    Patch i has dimensional radius L_i = a_i eps R.  Coefficients are stored
    at eps = 1 with gauges eps^-2, eps^-1, log(2/eps), 1, 1.  Shape constants
    default to the disk values c2 = 4/(3 pi), c3 = 0.3651.., e = 1/8.
    """
    centers = np.atleast_2d(np.asarray(centers, dtype=float))
    a = np.asarray(radii, dtype=float).reshape(-1)
    kap = np.array([parse_reactivity(k) for k in reactivities])
    n = a.size
    if np.any(np.isinf(kap)):
        raise DomainError("the moderate-reactivity expansion needs finite reactivities")
    if np.any(kap <= 0):
        raise DomainError("reactivities must be positive")
    _, dc2, dc3 = disk_taylor_coeffs_exact()
    c2 = np.full(n, dc2) if c2 is None else np.asarray(c2, dtype=float)
    c3 = np.full(n, dc3) if c3 is None else np.asarray(c3, dtype=float)
    e = np.full(n, DISK_E_RATIO_SMALL) if e is None else np.asarray(e, dtype=float)
    G = green_matrix_from_centers(centers)
    surface = 4.0 * math.pi * R * R
    volume = 4.0 * math.pi * R**3 / 3.0
    # eps = 1 values; K_i scales as eps^2 and Kbar^(n) as eps^(n+1)
    K = kap * math.pi * a * a * R * R / surface
    kbar = float(K.sum())
    k2 = 2.0 * math.pi / (D * surface) * float(np.sum(c2 * (a * R) ** 3 * kap**2))
    k3 = 2.0 * math.pi / (D**2 * surface) * float(np.sum(c3 * (a * R) ** 4 * kap**3))
    pref = volume / surface
    terms = (
        Term("eps^-2", "eps^-2", pref / kbar),
        Term("eps^-1", "eps^-1", pref * k2 / kbar**2),
        Term("log", "log(2/eps)", pref * surface * float(K @ K) / (4.0 * math.pi * D * R * kbar**2)),
        Term("capacitance", "1", pref * (k2 * k2 - k3 * kbar) / kbar**3),
        Term(
            "interaction",
            "1",
            pref
            * surface
            / (2.0 * math.pi * R * D * kbar**2)
            * (2.0 * math.pi * _green_form(G, K) + float(np.sum(e * K * K))),
        ),
    )
    return ExpansionResult("mfrt_moderate", terms, extra={"K": tuple(K), "green": G})


def mfrt_moderate_identical(n, K, R, D, c3, green_sum):
    """Closed form of the moderate-reactivity terms for n identical unit disks;
    ``green_sum`` is e^T G e.  Coefficients at eps = 1 in the same order."""
    pref = 4.0 * math.pi * R**3 / 3.0 / (n * math.pi)
    return (
        pref / (K * R * R),
        pref * 8.0 / (3.0 * math.pi * R * D),
        pref / (4.0 * D * R),
        pref * (64.0 / (9.0 * math.pi**2) - 2.0 * c3) * K / D**2,
        pref / (2.0 * R * D) * (0.125 + 2.0 * math.pi * green_sum / n),
    )


# ---------------------------------------------------------------------------
# principal eigenvalue
# ---------------------------------------------------------------------------


def principal_eigenvalue(layout, models):
    """Three-term principal eigenvalue of the Laplacian with Robin patches:
    2 pi eps Cbar/|B| + eps^2 log(eps/2) pi C.C/|B| - (2 pi eps^2/|B|)(2 pi C.G.C + Ebar)."""
    C, E = patch_coefficients(layout, models)
    G = green_matrix(layout)
    terms = (
        Term("leading", "eps", 2.0 * math.pi * float(C.sum()) / BALL_VOLUME),
        Term("log", "eps^2*log(eps/2)", math.pi * float(C @ C) / BALL_VOLUME),
        Term(
            "constant",
            "eps^2",
            -2.0 * math.pi / BALL_VOLUME * (2.0 * math.pi * _green_form(G, C) + float(E.sum())),
        ),
    )
    return ExpansionResult("lambda0", terms, C=tuple(C), E=tuple(E))


# ---------------------------------------------------------------------------
# splitting probability
# ---------------------------------------------------------------------------


def splitting_from_CE(C, E, G, target=0):
    """Splitting probability of patch ``target``: U0 + eps log(eps/2) U10 + eps U11.

    U0 = C_t/Cbar, U10/U0 = -(C.C - C_t Cbar)/(2 Cbar),
    U11/U0 = (Ebar/Cbar - E_t/C_t) + 2 pi (C.G.C/Cbar - (G C)_t).
    The absolute products are stored so an inert target (C_t = 0) gives zero.
    """
    C = np.asarray(C, dtype=float)
    E = np.asarray(E, dtype=float)
    n = C.size
    if n < 2:
        raise ConfigError("splitting probabilities need at least two patches")
    if not 0 <= target < n:
        raise ConfigError(f"target index {target} out of range for {n} patches")
    cbar = float(C.sum())
    if not cbar > 0:
        raise DomainError("all patches are inert")
    ct = float(C[target])
    flags = ()
    if ct == 0.0:
        u0 = u10 = u11 = 0.0
        flags = ("inert_target",)
    else:
        u0 = ct / cbar
        u10 = -u0 * (float(C @ C) - ct * cbar) / (2.0 * cbar)
        u11 = u0 * (
            float(E.sum()) / cbar
            - float(E[target]) / ct
            + 2.0 * math.pi * (_green_form(G, C) / cbar - float((G @ C)[target]))
        )
    terms = (
        Term("leading", "1", u0),
        Term("log", "eps*log(eps/2)", u10),
        Term("constant", "eps", u11),
    )
    return ExpansionResult("splitting", terms, C=tuple(C), E=tuple(E), flags=flags,
                           extra={"target": target})


def splitting_coeffs(layout, models, target_index=0):
    """Three-term splitting probability of reaching patch ``target_index`` first."""
    C, E = patch_coefficients(layout, models)
    return splitting_from_CE(C, E, green_matrix(layout), target_index)


def splitting_sum_check(layout, models, epsilon=None):
    """Sum of all splitting probabilities at epsilon minus one."""
    eps = layout.epsilon if epsilon is None else epsilon
    C, E = patch_coefficients(layout, models)
    G = green_matrix(layout)
    total = sum(splitting_from_CE(C, E, G, i).evaluate(eps) for i in range(C.size))
    return total - 1.0


# ---------------------------------------------------------------------------
# homogenization
# ---------------------------------------------------------------------------


def k_eff(C, E, f, epsilon, b1=B1_UNIFORM):
    """Effective surface reactivity of many identical dilute patches:
    (2 f C/eps) / [1 + 4 b1 C sqrt(f) + eps C (E/C^2 - 1/4 - log(f)/4)]."""
    if not 0 < f < 1:
        raise DomainError("area fraction must lie in (0, 1)")
    if not epsilon > 0:
        raise DomainError("epsilon must be positive")
    if not C > 0:
        raise DomainError("capacitance must be positive")
    if f > DILUTE_WARN_FRACTION:
        warnings.warn(f"area fraction {f:.3g} is not dilute", AccuracyWarning, stacklevel=2)
    bracket = 1.0 + 4.0 * b1 * C * math.sqrt(f) + epsilon * C * (E / C**2 - 0.25 - 0.25 * math.log(f))
    if not bracket > 0:
        raise ValidityError(f"homogenization bracket {bracket:.4g} <= 0; formula outside its range")
    return 2.0 * f * C / epsilon / bracket


def k_eff_large_kappa(f, epsilon, b1=B1_UNIFORM):
    """Perfectly reactive limit (4f/(pi eps)) / [1 + (8 b1/pi) sqrt f + (eps/pi)(1 - log 4 - log(f)/2)]."""
    bracket = (
        1.0
        + 8.0 * b1 / math.pi * math.sqrt(f)
        + epsilon / math.pi * (1.0 - math.log(4.0) - 0.5 * math.log(f))
    )
    return 4.0 * f / (math.pi * epsilon) / bracket


def k_eff_small_kappa(kappa, f, epsilon, b1=B1_UNIFORM):
    """Weakly reactive limit (f kappa/eps) / [1 + 2 b1 kappa sqrt f - (eps kappa/16)(1 + 2 log f)]."""
    bracket = 1.0 + 2.0 * b1 * kappa * math.sqrt(f) - epsilon * kappa / 16.0 * (1.0 + 2.0 * math.log(f))
    return f * kappa / epsilon / bracket


def keff_dimensional(C, E, f, L, R, D, b1=B1_UNIFORM):
    """Dimensional effective reactivity (D/R) k_eff with epsilon = L/R."""
    sc = DimensionalScales(R, D, L / R)
    return sc.surface_rate(k_eff(C, E, f, sc.epsilon, b1))


def area_fraction(n, epsilon):
    """Surface fraction N pi eps^2 / (4 pi) covered by n unit-radius patches."""
    return n * epsilon**2 / 4.0


def green_energy(G):
    """P = 2 pi e^T G e."""
    return 2.0 * math.pi * float(np.sum(G))


def green_energy_from_H(n, H):
    """P = -9 N^2/10 + N(N-1) log 2 + 2 H."""
    return -0.9 * n * n + n * (n - 1) * math.log(2.0) + 2.0 * H


def homogenized_mfrt(k):
    """Volume-averaged MFRT 1/15 + 1/(3k) of the ball with uniform rate k."""
    return 1.0 / 15.0 + 1.0 / (3.0 * k)


# ---------------------------------------------------------------------------
# general domain
# ---------------------------------------------------------------------------


def general_domain_mfrt(volume, mean_curvatures, capacitances, epsilon):
    """Two-term MFRT of a smooth domain:
    (|Omega|/(2 pi Cbar eps)) (1 - (sum H_i C_i^2 / (2 Cbar)) eps log eps)."""
    C = np.asarray(capacitances, dtype=float)
    H = np.asarray(mean_curvatures, dtype=float)
    if C.shape != H.shape:
        raise ConfigError("one mean curvature per capacitance")
    cbar = float(C.sum())
    if not cbar > 0:
        raise DomainError("sum of capacitances must be positive")
    if not epsilon > 0:
        raise DomainError("epsilon must be positive")
    lead = volume / (2.0 * math.pi * cbar * epsilon)
    return lead * (1.0 - float(np.sum(H * C * C)) / (2.0 * cbar) * epsilon * math.log(epsilon))
