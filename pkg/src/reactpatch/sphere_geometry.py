"""Unit-sphere geometry: the surface Neumann Green's function, Green's
matrices over patch centers, the discrete energy, and patch layouts.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from itertools import product

import numpy as np
from scipy.spatial.distance import pdist

from .disk_steklov import format_reactivity, parse_reactivity
from .errors import ConfigError, DomainError, SeparationError

R_S = -9.0 / (20.0 * math.pi)
UNIT_TOLERANCE = 1e-12
SEPARATION_FACTOR = 4.0
PLATONIC_SIZES = (4, 6, 8, 12, 20)
LAYOUT_FORMAT = "reactpatch-layout"


def chord_from_angle(theta):
    """Chord length 2 sin(theta / 2) subtended by a polar angle."""
    return 2.0 * np.sin(np.asarray(theta, dtype=float) / 2.0)


def angle_from_chord(eps):
    """Inverse of ``chord_from_angle`` on 0 < eps < 2."""
    eps = np.asarray(eps, dtype=float)
    if np.any(eps <= 0.0) or np.any(eps >= 2.0):
        raise DomainError("chord must satisfy 0 < eps < 2")
    return 2.0 * np.arcsin(eps / 2.0)


def _unit_rows(centers):
    c = np.atleast_2d(np.asarray(centers, dtype=float))
    if c.ndim != 2 or c.shape[1] != 3:
        raise ConfigError("centers must be an (N, 3) array")
    return c


def _check_unit(c):
    norms = np.linalg.norm(c, axis=1)
    if np.any(np.abs(norms - 1.0) > UNIT_TOLERANCE):
        raise DomainError("patch centers must be unit vectors")


@dataclass(frozen=True, eq=False)
class PatchLayout:
    """Patch centers x_i on the unit sphere with radii a_i, reactivities kappa_i
    and the common scale epsilon.

    Radii are dimensionless with max a_i = 1.  Centers must be separated by at
    least ``separation_factor * epsilon * max(a_i)`` in chord distance.
    """

    centers: np.ndarray
    radii: np.ndarray
    reactivities: tuple
    epsilon: float
    separation_factor: float = SEPARATION_FACTOR

    def __post_init__(self):
        c = _unit_rows(self.centers)
        _check_unit(c)
        n = c.shape[0]
        radii = np.asarray(self.radii, dtype=float).reshape(-1)
        if radii.size != n:
            raise ConfigError(f"{n} centers but {radii.size} radii")
        if np.any(radii <= 0.0):
            raise DomainError("patch radii must be positive")
        if abs(radii.max() - 1.0) > UNIT_TOLERANCE:
            raise DomainError("radii must be scaled so that max a_i = 1")
        kap = tuple(parse_reactivity(k) for k in self.reactivities)
        if len(kap) != n:
            raise ConfigError(f"{n} centers but {len(kap)} reactivities")
        if any(not (k >= 0.0) for k in kap):
            raise DomainError("reactivities must lie in [0, inf]")
        eps = float(self.epsilon)
        if not eps > 0.0:
            raise DomainError("epsilon must be positive")
        if n > 1:
            gap = float(pdist(c).min())
            need = self.separation_factor * eps * float(radii.max())
            if gap < need:
                raise SeparationError(
                    f"closest centers are {gap:.6g} apart; need at least {need:.6g}"
                )
        c = c.copy()
        c.setflags(write=False)
        radii = radii.copy()
        radii.setflags(write=False)
        object.__setattr__(self, "centers", c)
        object.__setattr__(self, "radii", radii)
        object.__setattr__(self, "reactivities", kap)
        object.__setattr__(self, "epsilon", eps)

    @property
    def n_patches(self):
        return self.centers.shape[0]

    def with_epsilon(self, epsilon):
        return PatchLayout(
            self.centers, self.radii, self.reactivities, epsilon, self.separation_factor
        )

    def with_reactivities(self, reactivities):
        return PatchLayout(
            self.centers, self.radii, reactivities, self.epsilon, self.separation_factor
        )

    def to_dict(self):
        return {
            "format": LAYOUT_FORMAT,
            "epsilon": self.epsilon,
            "patches": [
                {
                    "center": [float(v) for v in x],
                    "radius": float(a),
                    "reactivity": format_reactivity(k),
                }
                for x, a, k in zip(self.centers, self.radii, self.reactivities)
            ],
        }

    def to_text(self):
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    @classmethod
    def from_dict(cls, data):
        """Build a layout from a mapping; each patch gives ``center`` or
        ``angles`` = [polar, azimuth], a ``radius`` and a ``reactivity``."""
        if not isinstance(data, dict) or "patches" not in data or "epsilon" not in data:
            raise ConfigError("layout needs 'epsilon' and 'patches'")
        patches = data["patches"]
        if not isinstance(patches, list) or not patches:
            raise ConfigError("layout 'patches' must be a non-empty list")
        centers, radii, kap = [], [], []
        for i, p in enumerate(patches):
            if not isinstance(p, dict):
                raise ConfigError(f"patch {i} must be a mapping")
            try:
                if ("center" in p) == ("angles" in p):
                    raise ConfigError(f"patch {i}: give exactly one of 'center' or 'angles'")
                if "center" in p:
                    x = np.asarray(p["center"], dtype=float)
                    if x.shape != (3,):
                        raise ConfigError(f"patch {i}: center must have 3 components")
                    x = x / np.linalg.norm(x)
                else:
                    theta, phi = (float(v) for v in p["angles"])
                    x = np.array(
                        [math.sin(theta) * math.cos(phi), math.sin(theta) * math.sin(phi), math.cos(theta)]
                    )
                centers.append(x)
                radii.append(float(p.get("radius", 1.0)))
                kap.append(parse_reactivity(p.get("reactivity", "inf")))
            except (TypeError, ValueError) as exc:
                if isinstance(exc, ConfigError):
                    raise
                raise ConfigError(f"patch {i}: {exc}") from exc
        try:
            eps = float(data["epsilon"])
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"bad epsilon: {exc}") from exc
        return cls(np.array(centers), np.array(radii), tuple(kap), eps)

    @classmethod
    def from_text(cls, text):
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"layout is not valid JSON: {exc}") from exc
        return cls.from_dict(data)


def polar_layout(n_patches=1, radii=None, reactivities=None, epsilon=0.1):
    """One patch at the north pole, or an antipodal north/south pair."""
    if n_patches not in (1, 2):
        raise ConfigError("polar layouts hold one or two patches")
    centers = np.array([[0.0, 0.0, 1.0], [0.0, 0.0, -1.0]])[:n_patches]
    radii = np.ones(n_patches) if radii is None else radii
    reactivities = (math.inf,) * n_patches if reactivities is None else reactivities
    return PatchLayout(centers, radii, reactivities, epsilon)


# ---------------------------------------------------------------------------
# Green's function
# ---------------------------------------------------------------------------


def green_s(x, xi):
    """Surface Neumann Green's function of the unit ball with source xi on the
    sphere, normalized to zero volume average:

        1/(2 pi |x - xi|) + (|x|^2 + 1)/(8 pi)
        + (1/4 pi) log(2 / (1 - x.xi + |x - xi|)) - 7/(10 pi).

    ``x`` may be a single point or an (M, 3) array of points.
    """
    x = np.asarray(x, dtype=float)
    xi = np.asarray(xi, dtype=float)
    if abs(np.linalg.norm(xi) - 1.0) > 1e-10:
        raise DomainError("source point must lie on the unit sphere")
    pts = np.atleast_2d(x)
    if np.any(np.einsum("ij,ij->i", pts, pts) > 1.0 + 1e-10):
        raise DomainError("field point must satisfy |x| <= 1")
    dist = np.linalg.norm(pts - xi, axis=1)
    if np.any(dist == 0.0):
        raise DomainError("green_s is singular at x = xi")
    out = _green_s_parts(dist, pts @ xi, np.einsum("ij,ij->i", pts, pts))
    return float(out[0]) if x.ndim == 1 else out


def _green_s_parts(dist, dot, rho2):
    return (
        1.0 / (2.0 * np.pi * dist)
        + (rho2 + 1.0) / (8.0 * np.pi)
        + np.log(2.0 / (1.0 - dot + dist)) / (4.0 * np.pi)
        - 7.0 / (10.0 * np.pi)
    )


def green_matrix_from_centers(centers):
    """Symmetric Green's matrix: G_s(x_i; x_j) off the diagonal, R_s on it."""
    c = _unit_rows(centers)
    _check_unit(c)
    n = c.shape[0]
    g = np.full((n, n), R_S)
    iu, ju = np.triu_indices(n, k=1)
    if iu.size:
        diff = c[iu] - c[ju]
        dist = np.linalg.norm(diff, axis=1)
        if np.any(dist == 0.0):
            raise DomainError("coincident patch centers")
        dot = np.einsum("ij,ij->i", c[iu], c[ju])
        vals = _green_s_parts(dist, dot, np.ones_like(dist))
        g[iu, ju] = vals
        g[ju, iu] = vals
    return g


def green_matrix(layout):
    """Green's matrix over the centers of a validated ``PatchLayout``."""
    return green_matrix_from_centers(layout.centers)


def green_volume_average(xi=(0.0, 0.0, 1.0), n_radial=64, n_polar=64):
    """Mean of G_s(x; xi) over the unit ball by Gauss-Legendre in (r, cos theta).

    Angles are measured from xi, so the azimuthal integral is exact (2 pi).
    """
    xi = np.asarray(xi, dtype=float)
    r, wr = np.polynomial.legendre.leggauss(n_radial)
    t, wt = np.polynomial.legendre.leggauss(n_polar)
    r = 0.5 * (r + 1.0)
    wr = 0.5 * wr
    rr, tt = np.meshgrid(r, t, indexing="ij")
    dist = np.sqrt(np.clip(rr * rr + 1.0 - 2.0 * rr * tt, 0.0, None))
    vals = _green_s_parts(dist, rr * tt, rr * rr)
    total = 2.0 * np.pi * np.einsum("i,j,ij->", wr * r * r, wt, vals)
    return float(total / (4.0 * np.pi / 3.0))


# ---------------------------------------------------------------------------
# discrete energy and layouts
# ---------------------------------------------------------------------------


def discrete_energy(centers):
    """sum_{i<j} 1/d_ij - (1/2) log d_ij - (1/2) log(2 + d_ij), chord d_ij."""
    c = _unit_rows(centers)
    if c.shape[0] < 2:
        return 0.0
    d = pdist(c)
    if np.any(d <= 1e-14):
        raise DomainError("coincident centers in discrete energy")
    return float(np.sum(1.0 / d - 0.5 * np.log(d) - 0.5 * np.log(2.0 + d)))


def discrete_energy_asymptote(n, b1=-0.5):
    """Large-N energy of uniformly spread points:
    N^2 (1 - log 2)/2 + b1 N^(3/2) - N log N / 8 + N (log 2 - 1/4)/2.

    b1 = -1/2 is the uniform-density value; quasi-uniform lattices with
    defects sit nearer b1 = -0.5523.
    """
    n = float(n)
    return (
        n * n * (1.0 - math.log(2.0)) / 2.0
        + b1 * n**1.5
        - n * math.log(n) / 8.0
        + n * (math.log(2.0) - 0.25) / 2.0
    )


def fibonacci_layout(n):
    """Golden-spiral lattice with heights z_i = 1 - 2i/(N-1), i = 0..N-1."""
    n = int(n)
    if n < 1:
        raise ConfigError("need at least one point")
    if n == 1:
        return np.array([[0.0, 0.0, 1.0]])
    i = np.arange(n)
    z = 1.0 - 2.0 * i / (n - 1)
    phi = i * math.pi * (3.0 - math.sqrt(5.0))
    s = np.sqrt(np.clip(1.0 - z * z, 0.0, None))
    return np.column_stack([s * np.cos(phi), s * np.sin(phi), z])


def platonic_layout(n):
    """Normalized vertices of the Platonic solid with n vertices."""
    if n not in PLATONIC_SIZES:
        raise ConfigError(f"platonic layouts exist for N in {PLATONIC_SIZES}, not {n}")
    phi = (1.0 + math.sqrt(5.0)) / 2.0
    if n == 4:
        v = [(1, 1, 1), (1, -1, -1), (-1, 1, -1), (-1, -1, 1)]
    elif n == 6:
        v = [(1, 0, 0), (-1, 0, 0), (0, 1, 0), (0, -1, 0), (0, 0, 1), (0, 0, -1)]
    elif n == 8:
        v = list(product((1, -1), repeat=3))
    elif n == 12:
        v = []
        for s1, s2 in product((1, -1), repeat=2):
            v += [(0, s1, s2 * phi), (s1, s2 * phi, 0), (s2 * phi, 0, s1)]
    else:
        v = list(product((1, -1), repeat=3))
        for s1, s2 in product((1, -1), repeat=2):
            v += [(0, s1 / phi, s2 * phi), (s1 / phi, s2 * phi, 0), (s2 * phi, 0, s1 / phi)]
    v = np.array(v, dtype=float)
    return v / np.linalg.norm(v, axis=1)[:, None]
