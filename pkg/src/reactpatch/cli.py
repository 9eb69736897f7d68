"""Command-line front end.

Every command builds its full list of output records before printing, so a
failure never leaves partial output.  Exit status is 0 on success, 2 for
configuration errors and 3 for numerical failures; the latter also prints a
JSON diagnostic record.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
import warnings
from pathlib import Path

from . import expansions as ex
from .disk_steklov import (
    MODES,
    Q_METHODS,
    CapacitanceModel,
    cache_dir_from_env,
    cached_spectrum,
    capacitance,
    capacitance_derivative,
    format_reactivity,
    monopole_E,
    monopole_E_heuristic,
    parse_reactivity,
    patch_C_E,
)
from .errors import ConfigError, NumericalError
from .oracle import SOLVERS, sn_oracle
from .reference import TABLE_IDS, all_pass, reproduce
from .sphere_geometry import PatchLayout, angle_from_chord, chord_from_angle, polar_layout
from .steklov_asym import sdn_eigenvalues, sn_near_resonant, sn_nonresonant

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3
FORMATS = ("table", "csv", "json")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


def _reactivity(text):
    try:
        return parse_reactivity(text)
    except ConfigError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def _positive(text):
    value = float(text)
    if not value > 0:
        raise argparse.ArgumentTypeError(f"expected a positive number, got {text}")
    return value


# ---------------------------------------------------------------------------
# output
# ---------------------------------------------------------------------------


def _fmt(value):
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        if math.isinf(value):
            return "inf"
        if math.isnan(value):
            return "nan"
        return f"{value:.10g}"
    return str(value)


def _jsonable(value):
    if isinstance(value, float) and (math.isinf(value) or math.isnan(value)):
        return "inf" if value > 0 else ("-inf" if math.isinf(value) else "nan")
    return value


def render(records, fmt):
    if fmt == "json":
        return "\n".join(
            json.dumps({k: _jsonable(v) for k, v in r.items()}, sort_keys=False) for r in records
        )
    if not records:
        return ""
    keys = []
    for r in records:
        keys += [k for k in r if k not in keys]
    rows = [[_fmt(r.get(k, "")) for k in keys] for r in records]
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(keys)
        w.writerows(rows)
        return buf.getvalue().rstrip("\n")
    widths = [max(len(k), *(len(row[i]) for row in rows)) for i, k in enumerate(keys)]
    lines = ["  ".join(k.ljust(w) for k, w in zip(keys, widths))]
    lines += ["  ".join(c.ljust(w) for c, w in zip(row, widths)) for row in rows]
    return "\n".join(line.rstrip() for line in lines)


# ---------------------------------------------------------------------------
# shared option groups
# ---------------------------------------------------------------------------


def _add_common(p):
    p.add_argument("--n-modes", type=int, default=64)
    p.add_argument("--n-quad", type=int, default=800)
    p.add_argument("--format", choices=FORMATS, default="table")
    p.add_argument("--cache-dir", type=Path, default=None)


def _add_layout(p):
    p.add_argument("--layout", type=Path, help="JSON layout file")
    p.add_argument("--patches", type=int, choices=(1, 2), help="polar patches (1 or 2)")
    p.add_argument("--radii", type=_positive, nargs="+")
    p.add_argument("--kappa", type=_reactivity, nargs="+")
    size = p.add_mutually_exclusive_group()
    size.add_argument("--eps", type=_positive, help="patch scale as a chord")
    size.add_argument("--angle", type=_positive, help="patch scale as a polar angle")
    size.add_argument("--length", type=_positive, help="dimensional patch length L (needs --R)")
    p.add_argument("--R", type=_positive, default=None, help="sphere radius for --length")
    p.add_argument("--eps-list", type=_positive, nargs="+", help="extra scales to evaluate at")


def _model(args):
    if args.n_modes < 2 or args.n_quad < 4 * args.n_modes:
        raise ConfigError("need n_modes >= 2 and n_quad >= 4 n_modes")
    cache = args.cache_dir if args.cache_dir is not None else cache_dir_from_env()
    return CapacitanceModel(cached_spectrum(1.0, args.n_modes, args.n_quad, cache))


def _epsilon(args, default=None):
    if args.eps is not None:
        return args.eps
    if args.angle is not None:
        return float(chord_from_angle(args.angle))
    if args.length is not None:
        if args.R is None:
            raise ConfigError("--length needs --R")
        return args.length / args.R
    return default


def _layout(args):
    eps = _epsilon(args)
    if args.layout is not None:
        if args.patches is not None or args.radii or args.kappa:
            raise ConfigError("give either --layout or inline patch options, not both")
        try:
            text = args.layout.read_text()
        except OSError as exc:
            raise ConfigError(f"cannot read layout: {exc}") from exc
        lay = PatchLayout.from_text(text)
        return lay if eps is None else lay.with_epsilon(eps)
    n = args.patches or 1
    if eps is None:
        raise ConfigError("give a patch scale with --eps, --angle or --length")
    radii = args.radii or [1.0] * n
    kappa = args.kappa or [math.inf] * n
    if len(radii) != n or len(kappa) != n:
        raise ConfigError(f"{n} patches need {n} radii and {n} reactivities")
    return polar_layout(n, radii, kappa, eps)


def _eps_list(args, lay):
    return args.eps_list or [lay.epsilon]


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def cmd_capacitance(args):
    model = _model(args).for_radius(args.radius).with_mode(args.mode)
    return [
        {
            "radius": args.radius,
            "kappa": format_reactivity(k),
            "mode": args.mode,
            "C": capacitance(model, k),
            "dC": capacitance_derivative(model, k),
        }
        for k in args.kappa
    ]


def cmd_monopole(args):
    model = _model(args).for_radius(args.radius)
    out = []
    for k in args.kappa:
        rec = {"radius": args.radius, "kappa": format_reactivity(k),
               "E": monopole_E(model, k, method=args.method)}
        if k >= 0:
            rec["E_heuristic"] = monopole_E_heuristic(args.radius, k)
        out.append(rec)
    return out


def cmd_spectrum(args):
    spec = _model(args).spectrum.rescaled(args.radius)
    if not 1 <= args.count <= spec.n_modes:
        raise ConfigError(f"count must lie in [1, {spec.n_modes}]")
    return [
        {"k": k, "mu": float(spec.mu[k]), "d": float(spec.d[k]),
         "d2_over_pi": float(spec.d[k] ** 2 / math.pi)}
        for k in range(args.count)
    ]


def _expansion_records(res, eps_list):
    out = [dict(r) for r in res.records()]
    for e in eps_list:
        out.append({"kind": res.kind, "label": "value", "gauge": f"eps={e:g}",
                    "coefficient": res.evaluate(e)})
    return out


def cmd_mfrt(args):
    lay = _layout(args)
    return _expansion_records(ex.mfrt_coeffs(lay, _model(args)), _eps_list(args, lay))


def cmd_splitting(args):
    lay = _layout(args)
    res = ex.splitting_coeffs(lay, _model(args), args.target)
    return _expansion_records(res, _eps_list(args, lay))


def cmd_lambda0(args):
    lay = _layout(args)
    return _expansion_records(ex.principal_eigenvalue(lay, _model(args)), _eps_list(args, lay))


def _branch_records(branches, eps_list):
    return [b.record(eps_list) for b in branches]


def cmd_sdn(args):
    lay = _layout(args)
    branches = sdn_eigenvalues(_model(args), lay, args.branches, args.steklov_index)
    return _branch_records(branches, _eps_list(args, lay))


def cmd_sn(args):
    lay = _layout(args)
    model = _model(args)
    if args.near_resonant is not None:
        branches = sn_near_resonant(model, lay, args.near_resonant)
    else:
        branches = sn_nonresonant(model, lay, args.branches)
    return _branch_records(branches, _eps_list(args, lay))


def cmd_sn_oracle(args):
    angles = args.angles
    if args.chords:
        angles = [float(angle_from_chord(c)) for c in angles]
    res = sn_oracle(tuple(angles), args.nmax, args.neigs, solver=args.solver)
    return [
        {"k": i + 1, "sigma": s, "n_max": res.n_max,
         "angles": " ".join(f"{a:.10g}" for a in res.patch_angles)}
        for i, s in enumerate(res.eigenvalues)
    ]


def cmd_homog(args):
    model = _model(args).with_mode(args.mode)
    f = args.f if args.f is not None else ex.area_fraction(args.n, args.eps)
    out = []
    for k in args.kappa:
        C, E = patch_C_E(model, k)
        rec = {"kappa": format_reactivity(k), "f": f, "eps": args.eps, "C": C, "E": E,
               "k_eff": ex.k_eff(C, E, f, args.eps, args.b1)}
        rec["u_bar_eff"] = ex.homogenized_mfrt(rec["k_eff"])
        out.append(rec)
    return out


def cmd_reproduce(args):
    cache = args.cache_dir if args.cache_dir is not None else cache_dir_from_env()
    return reproduce(args.table, args.n_modes, args.n_quad, cache, args.nmax)


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def build_parser():
    p = _Parser(prog="reactpatch", description="Reactive patches on the unit sphere.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("capacitance", help="reactive capacitance C(kappa) of a disk")
    _add_common(s)
    s.add_argument("--radius", type=_positive, default=1.0)
    s.add_argument("--kappa", type=_reactivity, nargs="+", required=True)
    s.add_argument("--mode", choices=MODES, default="spectral")
    s.set_defaults(func=cmd_capacitance)

    s = sub.add_parser("monopole", help="monopole coefficient E(kappa) of a disk")
    _add_common(s)
    s.add_argument("--radius", type=_positive, default=1.0)
    s.add_argument("--kappa", type=_reactivity, nargs="+", required=True)
    s.add_argument("--method", choices=Q_METHODS, default="auto")
    s.set_defaults(func=cmd_monopole)

    s = sub.add_parser("spectrum", help="local Steklov eigenvalues and weights")
    _add_common(s)
    s.add_argument("--radius", type=_positive, default=1.0)
    s.add_argument("--count", type=int, default=8)
    s.set_defaults(func=cmd_spectrum)

    for name, func, helptext in (
        ("mfrt", cmd_mfrt, "three-term mean first-reaction time"),
        ("lambda0", cmd_lambda0, "principal eigenvalue with reactive patches"),
    ):
        s = sub.add_parser(name, help=helptext)
        _add_common(s)
        _add_layout(s)
        s.set_defaults(func=func)

    s = sub.add_parser("splitting", help="three-term splitting probability")
    _add_common(s)
    _add_layout(s)
    s.add_argument("--target", type=int, default=0)
    s.set_defaults(func=cmd_splitting)

    s = sub.add_parser("sdn", help="Steklov-Dirichlet-Neumann eigenvalue branches")
    _add_common(s)
    _add_layout(s)
    s.add_argument("--branches", type=int, default=3)
    s.add_argument("--steklov-index", type=int, default=0)
    s.set_defaults(func=cmd_sdn)

    s = sub.add_parser("sn", help="Steklov-Neumann eigenvalue branches")
    _add_common(s)
    _add_layout(s)
    s.add_argument("--branches", type=int, default=4)
    s.add_argument("--near-resonant", type=int, default=None, metavar="K",
                   help="branches split from local eigenvalue mu_K of identical patches")
    s.set_defaults(func=cmd_sn)

    s = sub.add_parser("sn-oracle", help="Legendre-matrix Steklov-Neumann eigenvalues")
    _add_common(s)
    s.add_argument("--angles", type=_positive, nargs="+", required=True)
    s.add_argument("--chords", action="store_true", help="read --angles as chords")
    s.add_argument("--nmax", type=int, default=1000)
    s.add_argument("--neigs", type=int, default=5)
    s.add_argument("--solver", choices=SOLVERS, default="nonsymmetric")
    s.set_defaults(func=cmd_sn_oracle)

    s = sub.add_parser("homog", help="homogenized effective reactivity")
    _add_common(s)
    s.add_argument("--kappa", type=_reactivity, nargs="+", required=True)
    s.add_argument("--eps", type=_positive, required=True)
    frac = s.add_mutually_exclusive_group(required=True)
    frac.add_argument("--f", type=_positive, help="area fraction")
    frac.add_argument("--n", type=int, help="number of unit patches")
    s.add_argument("--b1", type=float, default=ex.B1_UNIFORM)
    s.add_argument("--mode", choices=MODES, default="spectral")
    s.set_defaults(func=cmd_homog)

    s = sub.add_parser("reproduce", help="compare against published reference tables")
    _add_common(s)
    s.add_argument("table", choices=TABLE_IDS)
    s.add_argument("--nmax", type=int, default=None)
    s.set_defaults(func=cmd_reproduce)
    return p


def run(argv=None, stdout=None, stderr=None):
    """Parse ``argv``, run the command and return the exit status."""
    stdout = stdout if stdout is not None else sys.stdout
    stderr = stderr if stderr is not None else sys.stderr
    fmt = "table"
    try:
        args = build_parser().parse_args(argv)
        fmt = args.format
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            records = args.func(args)
        text = render(records, fmt)
    except ConfigError as exc:
        print(f"reactpatch: configuration error: {exc}", file=stderr)
        return EXIT_CONFIG
    except NumericalError as exc:
        diag = {"error": type(exc).__name__, "message": str(exc)}
        print(json.dumps(diag), file=stdout)
        print(f"reactpatch: numerical failure: {exc}", file=stderr)
        return EXIT_NUMERICAL
    for w in caught:
        print(f"reactpatch: warning: {w.message}", file=stderr)
    if text:
        print(text, file=stdout)
    if args.command == "reproduce" and not all_pass(records):
        return EXIT_NUMERICAL
    return EXIT_OK


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
