"""Command-line front end.

Exit codes: 0 success, 1 verification failure, 2 input error.
"""

import argparse
import json
import sys

import numpy as np

from . import verify as verify_mod
from .baouendi import (
    BaouendiSpec,
    fd_solve,
    orthogonality_check,
    monneau_derivative_check,
    problem_from_json,
    solid_harmonic_quadratic,
    weiss_derivative_check,
)
from .errors import ParseError, SubfreqError
from .frequency import FunctionHandle, frequency_curve, geometric_radii
from .groups import Point, group_from_json
from .polynomials import Polynomial, discrepancy_poly, harmonic_basis


def _read(path):
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc


def _load_group(path):
    return group_from_json(_read(path))


def _load_poly(path, m=None, k=None, tweight=2):
    return Polynomial.from_json(_read(path), m=m, k=k, tweight=tweight)


def _emit(args, text):
    if getattr(args, "out", None):
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text if text.endswith("\n") else text + "\n")
    else:
        print(text, end="" if text.endswith("\n") else "\n")


def _radii(args):
    if args.steps < 1 or args.rmin <= 0 or args.rmax < args.rmin:
        raise ParseError("need 0 < rmin <= rmax and steps >= 1")
    if args.steps == 1:
        return np.array([args.rmin])
    return geometric_radii(args.rmin, args.rmax, args.steps)


def _add_radius_flags(p, rmin=0.5, rmax=1.5, steps=16):
    p.add_argument("--rmin", type=float, default=rmin)
    p.add_argument("--rmax", type=float, default=rmax)
    p.add_argument("--steps", type=int, default=steps)


def cmd_group(args):
    g = _load_group(args.group)
    info = {"m": g.m, "k": g.k, "N": g.N, "Q": g.Q,
            "htype": g.classification["is_htype"],
            "metivier": g.classification["is_metivier"]}
    if args.json:
        _emit(args, json.dumps(info))
    else:
        _emit(args, " ".join(f"{key}={str(val).lower()}" for key, val in info.items()))
    return 0


def cmd_harmonics(args):
    g = _load_group(args.group)
    basis = harmonic_basis(g, args.degree)
    payload = [p.to_json() for p in basis]
    _emit(args, json.dumps(payload, indent=None if args.json else 1))
    return 0


def _build_rule(context, resolution):
    from .quadrature import build_sphere_rule

    return build_sphere_rule(context, resolution)


def cmd_frequency(args):
    g = _load_group(args.group)
    p = _load_poly(args.poly, m=g.m, k=g.k)
    center = None
    if args.center:
        raw = json.loads(args.center)
        center = Point(tuple(raw[0]), tuple(raw[1]))
    u = FunctionHandle.from_polynomial(g, p, center=center, label=args.poly)
    rule = _build_rule(g, args.resolution)
    ref = None
    if args.ref:
        ref = FunctionHandle.from_polynomial(
            g, _load_poly(args.ref, m=g.m, k=g.k), label=args.ref)
    curve = frequency_curve(u, rule, _radii(args), kappa=args.kappa, ref=ref)
    if np.all(np.isnan(curve.N)):
        print("warning: H(r) = 0 at every radius; N is NaN", file=sys.stderr)
    _emit(args, curve.to_csv())
    return 0


def cmd_discrepancy(args):
    g = _load_group(args.group)
    g.require_htype("discrepancy")
    p = _load_poly(args.poly, m=g.m, k=g.k)
    disc = discrepancy_poly(g, p)
    if args.json:
        _emit(args, json.dumps({"vanishes": disc.is_zero(),
                                "numerator": disc.to_json()}))
    else:
        _emit(args, f"vanishes={str(disc.is_zero()).lower()}\n"
                    f"{json.dumps(disc.to_json())}")
    return 0


def _baouendi_input(args):
    """Returns (spec, function, rule_context). Solves the FD problem when a
    problem file is given, otherwise loads a polynomial."""
    if args.problem:
        spec, box, grid, poly = problem_from_json(_read(args.problem))
        sol = fd_solve(spec, box, grid, poly.evaluate)
        return spec, sol.as_handle()
    if not (args.poly and args.m and args.k and args.alpha is not None):
        raise ParseError("need --problem, or --poly with --m --k --alpha")
    spec = BaouendiSpec(args.m, args.k, args.alpha)
    p = _load_poly(args.poly, m=spec.m, k=spec.k,
                   tweight=spec.integer_alpha() + 1)
    return spec, FunctionHandle.from_polynomial(spec, p, label=args.poly)


def cmd_baouendi_solve(args):
    spec, box, grid, poly = problem_from_json(_read(args.problem))
    sol = fd_solve(spec, box, grid, poly.evaluate)
    if args.out:
        np.savez(args.out, *sol.axes, values=sol.values)
    print(f"m={spec.m} k={spec.k} alpha={spec.alpha} grid={grid} "
          f"residual={sol.residual:.3e}")
    return 0


def cmd_baouendi_frequency(args):
    spec, u = _baouendi_input(args)
    rule = _build_rule(spec, args.resolution)
    curve = frequency_curve(u, rule, _radii(args), kappa=args.kappa)
    if np.all(np.isnan(curve.N)):
        print("warning: H(r) = 0 at every radius; N is NaN", file=sys.stderr)
    _emit(args, curve.to_csv())
    return 0


def cmd_baouendi_ortho(args):
    spec = BaouendiSpec(args.m, args.k, args.alpha)
    rule = _build_rule(spec, args.resolution)
    p1 = Polynomial.z_var(spec.m, spec.k, 0, tweight=spec.integer_alpha() + 1)
    pq = solid_harmonic_quadratic(spec)
    inner = orthogonality_check(spec, p1, pq, args.radius, rule)
    n1 = abs(orthogonality_check(spec, p1, p1, args.radius, rule)) ** 0.5
    n2 = abs(orthogonality_check(spec, pq, pq, args.radius, rule)) ** 0.5
    rel = abs(inner) / (n1 * n2)
    if args.json:
        _emit(args, json.dumps({"inner": inner, "relative": rel}))
    else:
        _emit(args, f"inner={inner:.3e} relative={rel:.3e}")
    return 0


def cmd_baouendi_weiss(args):
    spec, u = _baouendi_input(args)
    rule = _build_rule(spec, args.resolution)
    res = weiss_derivative_check(spec, u, args.kappa, _radii(args), rule)
    worst = float(np.max(res["residuals"]))
    _emit(args, f"max_residual={worst:.6e}")
    return 0


def cmd_baouendi_monneau(args):
    spec, u = _baouendi_input(args)
    ref = _load_poly(args.ref, m=spec.m, k=spec.k,
                     tweight=spec.integer_alpha() + 1)
    rule = _build_rule(spec, args.resolution)
    res = monneau_derivative_check(spec, u, ref, args.kappa, _radii(args), rule)
    worst = float(np.max(res["residuals"]))
    mono = bool(np.all(np.diff(res["M"]) >= -1e-5))
    _emit(args, f"max_residual={worst:.6e} nondecreasing={str(mono).lower()}")
    return 0


def cmd_verify(args):
    results = verify_mod.run_battery(resolution=args.resolution, seed=args.seed,
                                     flip_psi=args.inject_psi_sign_error)
    failed = [r for r in results if not r["passed"]]
    if args.json:
        _emit(args, json.dumps(results))
    else:
        lines = [f"{'PASS' if r['passed'] else 'FAIL'} {r['name']}: {r['detail']}"
                 for r in results]
        lines.append(f"{len(results) - len(failed)}/{len(results)} checks passed")
        _emit(args, "\n".join(lines))
    return 1 if failed else 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="subfreq",
        description="Frequency functions on step-2 Carnot groups and for "
                    "Baouendi operators")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("group", help="classify a group file")
    p.add_argument("--group", required=True)
    p.add_argument("--json", action="store_true")
    p.add_argument("--out")
    p.set_defaults(func=cmd_group)

    p = sub.add_parser("harmonics", help="solid harmonic basis of a degree")
    p.add_argument("--group", required=True)
    p.add_argument("--degree", type=int, required=True)
    p.add_argument("--json", action="store_true")
    p.add_argument("--out")
    p.set_defaults(func=cmd_harmonics)

    p = sub.add_parser("frequency", help="frequency curve CSV for a polynomial")
    p.add_argument("--group", required=True)
    p.add_argument("--poly", required=True)
    p.add_argument("--center", help="JSON point [[z...],[t...]]")
    p.add_argument("--kappa", type=float)
    p.add_argument("--ref", help="reference polynomial for the M column")
    p.add_argument("--resolution", type=int, default=32)
    _add_radius_flags(p)
    p.add_argument("--out")
    p.set_defaults(func=cmd_frequency)

    p = sub.add_parser("discrepancy", help="symbolic discrepancy of a polynomial")
    p.add_argument("--group", required=True)
    p.add_argument("--poly", required=True)
    p.add_argument("--json", action="store_true")
    p.add_argument("--out")
    p.set_defaults(func=cmd_discrepancy)

    bp = sub.add_parser("baouendi", help="Baouendi operator tools")
    bsub = bp.add_subparsers(dest="subcommand", required=True)

    def common_b(p, need_problem=False):
        p.add_argument("--problem", required=need_problem)
        if not need_problem:
            p.add_argument("--poly")
            p.add_argument("--m", type=int)
            p.add_argument("--k", type=int)
            p.add_argument("--alpha", type=float)
        p.add_argument("--resolution", type=int, default=32)
        p.add_argument("--out")

    p = bsub.add_parser("solve", help="finite-difference Dirichlet solve")
    p.add_argument("--problem", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_baouendi_solve)

    p = bsub.add_parser("frequency", help="frequency curve CSV")
    common_b(p)
    p.add_argument("--kappa", type=float)
    _add_radius_flags(p, rmin=0.05, rmax=0.4)
    p.set_defaults(func=cmd_baouendi_frequency)

    p = bsub.add_parser("ortho", help="orthogonality of solid harmonics")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--radius", type=float, default=1.0)
    p.add_argument("--resolution", type=int, default=32)
    p.add_argument("--json", action="store_true")
    p.add_argument("--out")
    p.set_defaults(func=cmd_baouendi_ortho)

    p = bsub.add_parser("weiss", help="Weiss derivative identity check")
    common_b(p)
    p.add_argument("--kappa", type=float, required=True)
    _add_radius_flags(p, rmin=0.05, rmax=0.4)
    p.set_defaults(func=cmd_baouendi_weiss)

    p = bsub.add_parser("monneau", help="Monneau derivative identity check")
    common_b(p)
    p.add_argument("--ref", required=True)
    p.add_argument("--kappa", type=float, required=True)
    _add_radius_flags(p, rmin=0.05, rmax=0.4)
    p.set_defaults(func=cmd_baouendi_monneau)

    p = sub.add_parser("verify", help="run the identity battery")
    p.add_argument("--resolution", type=int, default=32)
    p.add_argument("--seed", type=int, default=12345)
    p.add_argument("--json", action="store_true")
    p.add_argument("--out")
    p.add_argument("--inject-psi-sign-error", action="store_true",
                   help=argparse.SUPPRESS)
    p.set_defaults(func=cmd_verify)

    return parser


def entry(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (SubfreqError, json.JSONDecodeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main(argv=None):
    sys.exit(entry(argv))


if __name__ == "__main__":
    main()
