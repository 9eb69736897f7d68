"""Small-patch asymptotics of mixed Steklov eigenvalue problems on the unit
sphere.

SDN: one Steklov patch, the other patches Dirichlet, Neumann elsewhere.
SN: every patch Steklov, Neumann elsewhere.  Non-resonant branches come from
roots of sums of reactive capacitances at negative reactivity; near-resonant
branches of identical patches sit at a local Steklov eigenvalue and are split
by the Green's matrix restricted to vectors with zero sum.

Each branch is reported as sigma ~ sigma0 + eps log(eps/2) sigma1 + eps sigma2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import linalg

from .disk_steklov import (
    CapacitanceModel,
    _bisect_between,
    capacitance,
    capacitance_derivative,
    monopole_E,
    monopole_E_dirichlet,
    monopole_J,
    neumann_zeros,
    pole_offset,
    patch_solution_w,
)
from .errors import BracketError, ConfigError, ConvergenceError
from .sphere_geometry import green_matrix, green_matrix_from_centers, platonic_layout

REGIMES = ("sdn", "sn_nonresonant", "sn_near_resonant", "zero_bulk")
POLE_MERGE_TOLERANCE = 1e-9
ALPHA_GROUP_TOLERANCE = 1e-9
SIMPLE_GAP_TOLERANCE = 1e-8


@dataclass(frozen=True)
class EigenBranch:
    """One asymptotic eigenvalue branch with its expansion coefficients."""

    regime: str
    k: int
    sigma0: float
    sigma1: float
    sigma2: float
    multiplicity: int = 1
    flags: tuple = ()
    extra: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if self.regime not in REGIMES:
            raise ConfigError(f"unknown regime {self.regime!r}")

    def evaluate(self, eps):
        if "leading_order_only" in self.flags:
            return self.sigma0
        return self.sigma0 + eps * math.log(eps / 2.0) * self.sigma1 + eps * self.sigma2

    def record(self, eps_list=()):
        rec = {
            "regime": self.regime,
            "k": self.k,
            "sigma0": self.sigma0,
            "sigma1": self.sigma1,
            "sigma2": self.sigma2,
            "multiplicity": self.multiplicity,
        }
        for e in eps_list:
            rec[f"sigma(eps={e:g})"] = self.evaluate(e)
        return rec


def _unit_model(model):
    if model.mode != "spectral":
        raise ConfigError("Steklov asymptotics need a spectral capacitance model")
    return CapacitanceModel(model.spectrum.rescaled(1.0))


def _poles(model):
    """Poles mu_k of C(-sigma) for the model's radius, skipping zero-weight modes."""
    spec = model.spectrum
    return spec.mu[spec.d > 0.0]


# ---------------------------------------------------------------------------
# SDN
# ---------------------------------------------------------------------------


def sdn_eigenvalues(model, layout, n_branches=3, steklov_index=0):
    """SDN branches with patch ``steklov_index`` Steklov and the rest Dirichlet.

    sigma0 solves C_1(-sigma0) = -sum_{i>=2} C_i(inf) in (0, mu_0) and then in
    each gap (mu_{k-1}, mu_k) of the Steklov patch's poles.
    """
    n = layout.n_patches
    if n < 2:
        raise ConfigError("SDN needs at least one Dirichlet patch besides the Steklov patch")
    if not 0 <= steklov_index < n:
        raise ConfigError("steklov_index out of range")
    unit = _unit_model(model)
    radii = layout.radii
    m1 = unit.for_radius(radii[steklov_index])
    others = [i for i in range(n) if i != steklov_index]
    c_dir = np.array([2.0 * radii[i] / math.pi for i in others])
    e_dir = np.array([monopole_E_dirichlet(radii[i]) for i in others])
    s_dir = float(c_dir.sum())
    order = [steklov_index] + others
    G = green_matrix(layout)[np.ix_(order, order)]
    poles = _poles(m1)
    if n_branches > poles.size - 1:
        raise BracketError(f"{n_branches} branches need more than {poles.size} retained poles")
    branches = []
    for k in range(n_branches):
        lo = 0.0 if k == 0 else poles[k - 1]
        s0 = _bisect_between(lambda s: capacitance(m1, -s) + s_dir, lo, poles[k], f"SDN branch {k}",
                             xtol=1e-14, min_offset=pole_offset(m1.spectrum))
        c1 = capacitance(m1, -s0)
        dc1 = capacitance_derivative(m1, -s0)
        C = np.concatenate([[c1], c_dir])
        s1 = (c1 * c1 + float(c_dir @ c_dir)) / (2.0 * dc1)
        e1 = monopole_E(m1, -s0)
        s2 = -(2.0 * math.pi * float(C @ G @ C) + e1 + float(e_dir.sum())) / dc1
        branches.append(
            EigenBranch(
                "sdn",
                k,
                float(s0),
                float(s1),
                float(s2),
                extra={"C": tuple(C), "dC1": dc1, "E1": e1, "radius": float(radii[steklov_index]),
                       "steklov": (steklov_index,)},
            )
        )
    return branches


def sdn_sigma1_dirichlet_form(c_dir, dc1):
    """sigma1 written with the Dirichlet capacitances only:
    ((sum C_i)^2 + sum C_i^2) / (2 C_1')."""
    c_dir = np.asarray(c_dir, dtype=float)
    return (float(c_dir.sum()) ** 2 + float(c_dir @ c_dir)) / (2.0 * dc1)


def sdn_identical_leading(model, n_patches, a):
    """sigma0 for one unit Steklov patch and n-1 Dirichlet disks of radius a:
    root of C(-sigma0) = -2 a (n-1)/pi in (0, mu_0)."""
    unit = _unit_model(model)
    target = 2.0 * a * (n_patches - 1) / math.pi
    return _bisect_between(lambda s: capacitance(unit, -s) + target, 0.0, _poles(unit)[0], "SDN",
                           min_offset=pole_offset(unit.spectrum))


# ---------------------------------------------------------------------------
# SN, non-resonant
# ---------------------------------------------------------------------------


def _merged_poles(models):
    cap = min(float(m.spectrum.mu[-1]) for m in models)
    allp = np.sort(np.concatenate([_poles(m) for m in models]))
    allp = allp[allp < cap]
    merged = [allp[0]]
    coincident = False
    for p in allp[1:]:
        if p - merged[-1] <= POLE_MERGE_TOLERANCE * max(p, 1.0):
            coincident = True
            continue
        merged.append(p)
    return np.array(merged), coincident


def sn_nonresonant(model, layout, n_branches=4):
    """SN branches from the roots of N(sigma) = sum_i C_i(-sigma) between
    consecutive distinct poles of all patches.

    Coincident poles (identical patches) are flagged; the branches returned
    are then the non-resonant subset and ``sn_near_resonant`` supplies the rest.
    """
    unit = _unit_model(model)
    models = [unit.for_radius(a) for a in layout.radii]
    poles, coincident = _merged_poles(models)
    if n_branches > poles.size - 1:
        raise BracketError(f"{n_branches} branches need more than {poles.size} merged poles")
    G = green_matrix(layout)
    flags = ("coincident_poles",) if coincident else ()
    offset = max(pole_offset(m.spectrum) for m in models)

    def total(s):
        return sum(capacitance(m, -s) for m in models)

    branches = []
    for k in range(n_branches):
        s0 = _bisect_between(total, poles[k], poles[k + 1], f"SN branch {k}", min_offset=offset)
        C = np.array([capacitance(m, -s0) for m in models])
        dC = np.array([capacitance_derivative(m, -s0) for m in models])
        E = np.array([monopole_E(m, -s0) for m in models])
        dsum = float(dC.sum())
        s1 = 0.5 * float(C @ C) / dsum
        s2 = -(2.0 * math.pi * float(C @ G @ C) + float(E.sum())) / dsum
        branches.append(
            EigenBranch(
                "sn_nonresonant",
                k + 1,
                float(s0),
                float(s1),
                float(s2),
                flags=flags,
                extra={"C": tuple(C), "dC": tuple(dC), "E": tuple(E),
                       "gap": (float(poles[k]), float(poles[k + 1])),
                       "radii": tuple(layout.radii)},
            )
        )
    return branches


# ---------------------------------------------------------------------------
# SN, near-resonant
# ---------------------------------------------------------------------------


def zero_sum_basis(m):
    """Orthonormal basis (m, m-1) of vectors orthogonal to e = (1, ..., 1)."""
    q, _ = linalg.qr(np.ones((m, 1)), mode="full")
    return q[:, 1:]


def _group(values, vectors):
    groups = []
    i = 0
    while i < values.size:
        j = i + 1
        while j < values.size and values[j] - values[i] <= ALPHA_GROUP_TOLERANCE * max(1.0, abs(values[i])):
            j += 1
        groups.append((float(values[i:j].mean()), vectors[:, i:j]))
        i = j
    return groups


def near_resonant_alphas(centers):
    """Eigenvalues alpha (grouped by multiplicity) and zero-sum eigenvectors A
    of the Green's matrix restricted to e-perp."""
    centers = np.atleast_2d(np.asarray(centers, dtype=float))
    m = centers.shape[0]
    if m < 2:
        raise ConfigError("near-resonance needs at least two identical patches")
    G = green_matrix_from_centers(centers)
    Q = zero_sum_basis(m)
    vals, vecs = linalg.eigh(Q.T @ G @ Q)
    return _group(vals, Q @ vecs)


def sn_near_resonant(model, centers, k_prime):
    """Near-resonant SN branches at the local eigenvalue mu_{k'} of M identical
    unit patches centered at ``centers`` (array or ``PatchLayout``).

    sigma0 = mu_{k'}, sigma1 = mu^2 d^2 / (4 pi) and
    sigma2 = -(sigma1 / pi) (4 pi^2 alpha + J) for each eigenvalue alpha of the
    deflated Green's matrix.  Returns M - 1 branches counting multiplicity.
    """
    if hasattr(centers, "centers"):
        centers = centers.centers
    unit = _unit_model(model)
    spec = unit.spectrum
    if not 0 <= k_prime < spec.n_modes:
        raise ConfigError("k_prime out of range")
    mu, d = float(spec.mu[k_prime]), float(spec.d[k_prime])
    if d == 0.0:
        raise ConfigError(f"mode {k_prime} has zero weight; no near-resonant branch exists")
    gaps = np.abs(np.delete(spec.mu, k_prime) - mu)
    if gaps.min() < SIMPLE_GAP_TOLERANCE * mu:
        raise ConvergenceError(f"mu_{k_prime} is not simple; near-resonance unsupported")
    s1 = mu * mu * d * d / (4.0 * math.pi)
    J = monopole_J(unit, k_prime)
    out = []
    for alpha, vecs in near_resonant_alphas(centers):
        s2 = -(s1 / math.pi) * (4.0 * math.pi**2 * alpha + J)
        out.append(
            EigenBranch(
                "sn_near_resonant",
                k_prime,
                mu,
                s1,
                float(s2),
                multiplicity=vecs.shape[1],
                extra={"alpha": alpha, "J": J, "A": vecs, "d": d},
            )
        )
    return out


def sn_near_resonant_platonic(model, n, k_prime):
    """Near-resonant branches for identical patches at Platonic-solid vertices."""
    return sn_near_resonant(model, platonic_layout(n), k_prime)


def zero_bulk_branches(model, k_max, radius=1.0):
    """Leading-order eigenvalues mu_k^N / a with eigenfunctions concentrated on a
    patch; no correction terms are available."""
    unit = _unit_model(model)
    zeros = neumann_zeros(unit, k_max)[1:]
    return [
        EigenBranch("zero_bulk", k, float(z / radius), math.nan, math.nan,
                    flags=("leading_order_only",))
        for k, z in enumerate(zeros, start=1)
    ]


# ---------------------------------------------------------------------------
# eigenfunctions on the patches
# ---------------------------------------------------------------------------


def _gauss(a, n=64):
    x, w = np.polynomial.legendre.leggauss(n)
    return 0.5 * a * (x + 1.0), 0.5 * a * w


def eigenfunction_on_patch(branch, model, r, epsilon, patch=0):
    """Leading-order eigenfunction restricted to patch ``patch`` at local radius r.

    Non-resonant: U0 (1 - w(r; -sigma0)) with U0 fixed by
    eps^2 sum_i int (1 - w_i)^2 dA = 1 over the Steklov patches.
    Near-resonant: A_i psi~(r), psi~ = (2 pi/(mu d)) psi, scaled so that
    eps^2 |A|^2 int psi~^2 dA = 1; the first eigenvector of the branch is used.
    """
    unit = _unit_model(model)
    r = np.atleast_1d(np.asarray(r, dtype=float))
    if branch.regime == "sn_near_resonant":
        spec = unit.spectrum
        k = branch.k
        mu, d = float(spec.mu[k]), float(spec.d[k])
        A = np.asarray(branch.extra["A"])[:, 0]
        A = A / np.linalg.norm(A) * math.sqrt(branch.sigma1 / (epsilon**2 * math.pi))
        if not 0 <= patch < A.size:
            raise ConfigError("patch index out of range")
        return A[patch] * 2.0 * math.pi / (mu * d) * spec.psi_at(r)[k]
    if branch.regime == "zero_bulk":
        raise ConfigError("zero-bulk branches carry leading-order eigenvalues only")
    if branch.regime == "sdn":
        radii = (branch.extra["radius"],)
        if patch != branch.extra["steklov"][0]:
            return np.zeros_like(r)
        idx = 0
    else:
        radii = branch.extra["radii"]
        idx = patch
    if not 0 <= idx < len(radii):
        raise ConfigError("patch index out of range")
    s0 = branch.sigma0
    norm = 0.0
    for a in radii:
        m = unit.for_radius(a)
        x, w = _gauss(a)
        v = 1.0 - patch_solution_w(m, -s0, x)
        norm += 2.0 * math.pi * float(np.sum(w * x * v * v))
    u0 = 1.0 / (epsilon * math.sqrt(norm))
    m = unit.for_radius(radii[idx])
    return u0 * (1.0 - patch_solution_w(m, -s0, r))


def patch_integral(fun, a, n=64):
    """2 pi int_0^a f(r) r dr by Gauss-Legendre."""
    x, w = _gauss(a, n)
    return 2.0 * math.pi * float(np.sum(w * x * fun(x)))


__all__ = [
    "EigenBranch",
    "sdn_eigenvalues",
    "sdn_sigma1_dirichlet_form",
    "sdn_identical_leading",
    "sn_nonresonant",
    "sn_near_resonant",
    "sn_near_resonant_platonic",
    "near_resonant_alphas",
    "zero_sum_basis",
    "zero_bulk_branches",
    "eigenfunction_on_patch",
    "patch_integral",
]
