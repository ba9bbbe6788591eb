"""Command-line front end.

Subcommands: ``classify`` (one JSON report per structure), ``geodesics``
(closed-form enumeration, optionally scored against the sphere-scan
oracle), ``atlas`` (CSV sweep over the (p, q) parameter plane) and
``verify`` (seeded invariant suite).  Exit codes: 0 success, 1 verify
failure, 2 inadmissible parameters, 3 non-geodesic xi, 4 unwritable
output path.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np

from .classification import (
    AdmissibilityError,
    ClassificationReport,
    NotGeodesicError,
    classify,
    classify_representatives,
)
from .lie_core import LinearFunctional, MilnorParameters, from_functional, from_milnor
from .metric_geometry import enumerate_unit_geodesics, geodesic_brute_force, oracle_match
from .tolerances import default_tol
from .verify import GROUPS, run_groups

EXIT_VERIFY_FAILED = 1
EXIT_BAD_PARAMS = 2
EXIT_NOT_GEODESIC = 3
EXIT_BAD_OUTPUT = 4


def _add_param_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--alpha", type=float, help="adapted-form coefficient alpha")
    p.add_argument("--beta", type=float, help="adapted-form coefficient beta")
    p.add_argument("--gamma", type=float, help="adapted-form coefficient gamma")
    p.add_argument("--delta", type=float, help="adapted-form coefficient delta")
    p.add_argument("--p", type=float, help="parameter p (alpha = r+p, delta = r-p)")
    p.add_argument("--q", type=float, help="shear ratio q")
    p.add_argument("--r", type=float, help="parameter r = (alpha+delta)/2")
    p.add_argument("--l", type=str, metavar="x,y,z", help="rank-one functional covector")


def _parse_source(args):
    """MilnorParameters or LinearFunctional from the flag groups."""
    have_greek = [v is not None for v in (args.alpha, args.beta, args.gamma, args.delta)]
    have_pqr = [v is not None for v in (args.p, args.q, args.r)]
    n_groups = (any(have_greek)) + (any(have_pqr)) + (args.l is not None)
    if n_groups != 1:
        raise AdmissibilityError(
            "give exactly one of: --alpha/--beta/--gamma/--delta, --p/--q/--r, or --l"
        )
    if args.l is not None:
        return LinearFunctional(_parse_vector(args.l))
    if any(have_greek):
        if not all(have_greek):
            raise AdmissibilityError("--alpha, --beta, --gamma, --delta must all be given")
        return MilnorParameters(args.alpha, args.beta, args.gamma, args.delta)
    if not all(have_pqr):
        raise AdmissibilityError("--p, --q, --r must all be given")
    return MilnorParameters.from_pqr(args.p, args.q, args.r)


def _parse_vector(text: str) -> np.ndarray:
    try:
        parts = [float(t) for t in text.split(",")]
    except ValueError as exc:
        raise AdmissibilityError(f"cannot parse vector {text!r}: {exc}") from exc
    if len(parts) != 3:
        raise AdmissibilityError(f"expected three comma-separated components, got {text!r}")
    return np.array(parts)


def _report_json(rep: ClassificationReport) -> str:
    obj = {
        "family": rep.family,
        "params": rep.params,
        "D": rep.D,
        "geodesic_case": rep.geodesic_case,
        "contact_form": rep.contact_form,
        "contact_metric": rep.contact_metric,
        "normality_residual": rep.normality_residual,
        "errata_notes": list(rep.errata_notes),
    }
    return json.dumps(obj, sort_keys=True)


def cmd_classify(args) -> int:
    source = _parse_source(args)
    if args.xi == "auto":
        for rep in classify_representatives(source, tol=default_tol()):
            print(_report_json(rep))
    else:
        xi = _parse_vector(args.xi)
        print(_report_json(classify(source, xi, tol=default_tol())))
    return 0


def cmd_geodesics(args) -> int:
    source = _parse_source(args)
    if isinstance(source, LinearFunctional):
        enum = enumerate_unit_geodesics(functional=source)
        L = from_functional(source)
    else:
        enum = enumerate_unit_geodesics(source)
        L = from_milnor(source)
    agreement = None
    if args.oracle:
        pts = geodesic_brute_force(L, grid=args.oracle)
        agreement = oracle_match(enum, pts, args.oracle).agreement
    obj = {
        "case_tag": enum.case_tag,
        "discrete": [list(v) for v in enum.discrete],
        "families": [
            {
                "u": list(f.u),
                "v": list(f.v),
                "angles": "full" if f.angles is None else list(f.angles),
            }
            for f in enum.families
        ],
        "oracle_agreement": agreement,
    }
    print(json.dumps(obj, sort_keys=True))
    return 0


def _parse_range(text: str) -> np.ndarray:
    try:
        a, b, n = text.split(":")
        return np.linspace(float(a), float(b), int(n))
    except ValueError as exc:
        raise AdmissibilityError(f"range must be start:stop:count, got {text!r}") from exc


ATLAS_HEADER = "p,q,r,geodesic_case,Delta,D,n_discrete_geodesics,has_contact_structure,min_normality_residual"


def atlas_rows(p_values, q_values, r_value):
    """One row per (p, q) grid point, in row-major order."""
    for p in p_values:
        for q in q_values:
            params = MilnorParameters.from_pqr(float(p), float(q), float(r_value))
            enum = enumerate_unit_geodesics(params)
            reps = classify_representatives(params)
            delta_disc = (params.beta + params.gamma) ** 2 - 4.0 * params.alpha * params.delta
            D = 4.0 * (params.alpha * params.delta - params.beta * params.gamma) / (
                params.alpha + params.delta
            ) ** 2
            yield {
                "p": float(p),
                "q": float(q),
                "r": float(r_value),
                "geodesic_case": enum.case_tag,
                "Delta": delta_disc,
                "D": D,
                "n_discrete_geodesics": len(enum.isolated_points()),
                "has_contact_structure": any(rep.contact_form for rep in reps),
                "min_normality_residual": min(rep.normality_residual for rep in reps),
            }


def cmd_atlas(args) -> int:
    p_values = _parse_range(args.p_range)
    q_values = _parse_range(args.q_range)
    lines = [ATLAS_HEADER]
    for row in atlas_rows(p_values, q_values, args.r):
        lines.append(
            f"{row['p']!r},{row['q']!r},{row['r']!r},{row['geodesic_case']},"
            f"{row['Delta']!r},{row['D']!r},{row['n_discrete_geodesics']},"
            f"{str(row['has_contact_structure']).lower()},{row['min_normality_residual']!r}"
        )
    try:
        with open(args.out, "w") as fh:
            fh.write("\n".join(lines) + "\n")
    except OSError as exc:
        print(f"cannot write {args.out!r}: {exc}", file=sys.stderr)
        return EXIT_BAD_OUTPUT
    return 0


def cmd_verify(args) -> int:
    if args.list:
        for name in GROUPS:
            print(name)
        return 0
    names = args.group or None
    for name in names or ():
        if name not in GROUPS:
            print(f"unknown group {name!r}; known: {', '.join(GROUPS)}", file=sys.stderr)
            return EXIT_BAD_PARAMS
    results = run_groups(names, seed=args.seed, quick=args.quick)
    all_ok = True
    for res in results:
        print(f"[{'PASS' if res.passed else 'FAIL'}] {res.name}: {res.detail}")
        all_ok &= res.passed
    return 0 if all_ok else EXIT_VERIFY_FAILED


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="contact3",
        description="Almost contact metric structures on 3D non-unimodular metric Lie algebras",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_cls = sub.add_parser("classify", help="classify the structure for one or all geodesic xi")
    _add_param_flags(p_cls)
    p_cls.add_argument("--xi", required=True, help="x,y,z components, or 'auto'")
    p_cls.set_defaults(func=cmd_classify)

    p_geo = sub.add_parser("geodesics", help="enumerate unit geodesic vectors")
    _add_param_flags(p_geo)
    p_geo.add_argument("--oracle", type=int, metavar="GRID", help="cross-check with the sphere scan")
    p_geo.set_defaults(func=cmd_geodesics)

    p_atl = sub.add_parser("atlas", help="CSV sweep over the (p, q) plane")
    p_atl.add_argument("--p-range", required=True, metavar="a:b:n")
    p_atl.add_argument("--q-range", required=True, metavar="a:b:n")
    p_atl.add_argument("--r", type=float, required=True)
    p_atl.add_argument("--out", required=True)
    p_atl.set_defaults(func=cmd_atlas)

    p_ver = sub.add_parser("verify", help="run the seeded invariant suite")
    p_ver.add_argument("--seed", type=int, default=42)
    p_ver.add_argument("--group", action="append", help="run only this group (repeatable)")
    p_ver.add_argument("--list", action="store_true", help="print group names and exit")
    p_ver.add_argument("--quick", action="store_true", help="smaller samples, faster run")
    p_ver.set_defaults(func=cmd_verify)
    return parser


_FUSE_FLAGS = {"--p-range", "--q-range", "--xi", "--l"}


def _fuse_compound_values(argv: list[str]) -> list[str]:
    # argparse rejects option values like "-1:1:3" or "-1,0,0"; fold them
    # into --flag=value form
    out = []
    i = 0
    while i < len(argv):
        tok = argv[i]
        if tok in _FUSE_FLAGS and i + 1 < len(argv) and argv[i + 1].startswith("-"):
            out.append(tok + "=" + argv[i + 1])
            i += 2
        else:
            out.append(tok)
            i += 1
    return out


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(_fuse_compound_values(list(sys.argv[1:] if argv is None else argv)))
    try:
        return args.func(args)
    except AdmissibilityError as exc:
        print(f"inadmissible parameters: {exc}", file=sys.stderr)
        return EXIT_BAD_PARAMS
    except NotGeodesicError as exc:
        print(f"rejected xi: {exc}", file=sys.stderr)
        return EXIT_NOT_GEODESIC
    except ValueError as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_BAD_PARAMS


if __name__ == "__main__":
    sys.exit(main())
