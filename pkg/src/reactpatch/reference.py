"""Published reference values and the comparisons that reproduce them.

Each ``reproduce_*`` function returns a list of records
``{table, entry, computed, published, tolerance, error, pass}``.
"""

from __future__ import annotations

import math

import numpy as np

from .disk_steklov import CapacitanceModel, cached_spectrum, neumann_zeros
from .errors import ConfigError
from .oracle import sn_oracle
from .sphere_geometry import polar_layout
from .steklov_asym import sdn_eigenvalues, sn_near_resonant, sn_nonresonant

TABLE_IDS = ("sdn-two-patch", "sn-two-patch", "disk-spectrum", "sn-single-patch", "sn-single-coeffs")

DISK_MU = (1.1578, 4.3168, 7.4602, 10.602, 13.744, 16.886, 20.028, 23.169)
DISK_D = (1.7524, 0.2298, 0.1000, 0.0587, 0.0397, 0.0291, 0.0225, 0.0180)
DISK_D2_OVER_PI = (0.9775, 0.0168, 0.0032, 0.0011, 0.0005, 0.0003, 0.0002, 0.0001)
NEUMANN_ZEROS = (4.1213, 7.3421, 10.517)

SDN_TWO_POLAR = {0.1: (0.5561, 4.146, 7.338), 0.2: (0.5286, 4.088, 7.282)}

SN_TWO_POLAR_EPS = 0.2
SN_TWO_POLAR_ACCURATE = (1.0305, 4.0080, 4.1950, 7.2325, 7.3448)
SN_TWO_POLAR_NONRESONANT = (4.006, 7.232)
SN_TWO_POLAR_NEAR_RESONANT = (1.0075, 4.1896, 7.3416)

SN_SINGLE_ANGLES = (0.1, 0.15, 0.2, 0.25, 0.3)
SN_SINGLE_FIRST = {
    1000: (4.0646, 4.0362, 4.0080, 3.9801, 3.9523),
    2000: (4.0644, 4.0361, 4.0080, 3.9801, 3.9523),
}

SN_SINGLE_COEFFS = ((4.121, -0.573), (7.342, -0.552), (10.517, -0.542), (13.677, -0.535))


def _decimals(text):
    return len(text.split(".")[1]) if "." in text else 0


def printed_tolerance(value, sig=4):
    """Half a unit in the last printed digit or in the ``sig``-th significant
    digit, whichever is larger."""
    dp = _decimals(repr(float(value)))
    half_printed = 0.5 * 10.0 ** (-dp)
    if value == 0:
        return half_printed
    half_sig = 0.5 * 10.0 ** (math.floor(math.log10(abs(value))) - sig + 1)
    return max(half_printed, half_sig)


def last_digit_tolerance(value):
    """One unit in the last printed digit."""
    return 10.0 ** (-_decimals(repr(float(value))))


def _rec(table, entry, computed, published, tol):
    err = abs(computed - published)
    return {
        "table": table,
        "entry": entry,
        "computed": float(computed),
        "published": float(published),
        "tolerance": float(tol),
        "error": float(err),
        "rel_error": float(err / abs(published)) if published else float(err),
        "pass": bool(err <= tol * (1.0 + 1e-9)),
    }


def _model(n_modes, n_quad, cache_dir):
    return CapacitanceModel(cached_spectrum(1.0, n_modes, n_quad, cache_dir))


def reproduce_disk_spectrum(n_modes=64, n_quad=800, cache_dir=None):
    model = _model(n_modes, n_quad, cache_dir)
    spec = model.spectrum
    out = []
    for k in range(8):
        out.append(_rec("disk-spectrum", f"mu_{k}", spec.mu[k], DISK_MU[k], printed_tolerance(DISK_MU[k])))
    for k in range(8):
        out.append(_rec("disk-spectrum", f"d_{k}", spec.d[k], DISK_D[k], printed_tolerance(DISK_D[k])))
    for k in range(8):
        val = spec.d[k] ** 2 / math.pi
        out.append(_rec("disk-spectrum", f"d_{k}^2/pi", val, DISK_D2_OVER_PI[k], 0.5e-4))
    zeros = neumann_zeros(model, 3)[1:]
    for k, (z, p) in enumerate(zip(zeros, NEUMANN_ZEROS), start=1):
        out.append(_rec("disk-spectrum", f"muN_{k}", z, p, printed_tolerance(p)))
    return out


def reproduce_sdn_two_patch(n_modes=64, n_quad=800, cache_dir=None):
    model = _model(n_modes, n_quad, cache_dir)
    branches = sdn_eigenvalues(model, polar_layout(2, epsilon=0.2), 3)
    out = []
    for eps, pub in SDN_TWO_POLAR.items():
        for k, (b, p) in enumerate(zip(branches, pub)):
            out.append(_rec("sdn-two-patch", f"eps={eps} sigma^({k})", b.evaluate(eps), p,
                            last_digit_tolerance(p)))
    return out


def reproduce_sn_two_patch(n_modes=64, n_quad=800, cache_dir=None, n_max=2000):
    model = _model(n_modes, n_quad, cache_dir)
    eps = SN_TWO_POLAR_EPS
    out = []
    res = sn_oracle((eps, eps), n_max, 5)
    for k, (s, p) in enumerate(zip(res.eigenvalues, SN_TWO_POLAR_ACCURATE), start=1):
        out.append(_rec("sn-two-patch", f"accurate k={k}", s, p, 0.5e-4))
    nonres = sn_nonresonant(model, polar_layout(2, epsilon=eps), 2)
    for b, p in zip(nonres, SN_TWO_POLAR_NONRESONANT):
        out.append(_rec("sn-two-patch", f"non-resonant sigma0={b.sigma0:.4f}", b.evaluate(eps), p, 1e-3))
    for kp, p in enumerate(SN_TWO_POLAR_NEAR_RESONANT):
        (b,) = sn_near_resonant(model, polar_layout(2, epsilon=eps), kp)
        out.append(_rec("sn-two-patch", f"near-resonant k'={kp}", b.evaluate(eps), p, 1e-3))
    return out


def reproduce_sn_single_patch(n_max=1000):
    out = []
    pub = SN_SINGLE_FIRST[n_max] if n_max in SN_SINGLE_FIRST else SN_SINGLE_FIRST[1000]
    for eps, p in zip(SN_SINGLE_ANGLES, pub):
        s = sn_oracle(eps, n_max, 1).eigenvalues[0]
        out.append(_rec("sn-single-patch", f"n_max={n_max} eps={eps}", s, p, 0.5e-4))
    return out


def reproduce_sn_single_coeffs(n_modes=64, n_quad=800, cache_dir=None):
    model = _model(n_modes, n_quad, cache_dir)
    branches = sn_nonresonant(model, polar_layout(1), 4)
    out = []
    for k, (b, (s0, s2)) in enumerate(zip(branches, SN_SINGLE_COEFFS), start=1):
        out.append(_rec("sn-single-coeffs", f"branch {k} sigma0", b.sigma0, s0, 2e-3))
        out.append(_rec("sn-single-coeffs", f"branch {k} sigma2", b.sigma2, s2, 5e-3))
    return out


def reproduce(table_id, n_modes=64, n_quad=800, cache_dir=None, n_max=None):
    if table_id == "disk-spectrum":
        return reproduce_disk_spectrum(n_modes, n_quad, cache_dir)
    if table_id == "sdn-two-patch":
        return reproduce_sdn_two_patch(n_modes, n_quad, cache_dir)
    if table_id == "sn-two-patch":
        return reproduce_sn_two_patch(n_modes, n_quad, cache_dir, n_max or 2000)
    if table_id == "sn-single-patch":
        return reproduce_sn_single_patch(n_max or 1000)
    if table_id == "sn-single-coeffs":
        return reproduce_sn_single_coeffs(n_modes, n_quad, cache_dir)
    raise ConfigError(f"unknown table {table_id!r}; choose from {TABLE_IDS}")


def all_pass(records):
    return bool(np.all([r["pass"] for r in records]))
