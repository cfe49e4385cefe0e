"""Command-line interface.

Thin wrappers only: parsing, dispatch and output formatting; all numerics
live in the library modules.  Exit codes: 0 success / verification pass,
1 verification failure, 2 usage error.  Diagnostics go to stderr, data to
stdout or --out.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from . import __version__
from .errors import BranchGasError
from .law import BranchingLaw
from .poly import parse_rational, rational_point
from .quadratic import (
    EnergyCosts,
    GluedSystem,
    occupation_conjecture_report,
    occupation_expectation,
    verify_glued_recurrence,
    verify_power_identity,
    verify_regular_quadratic,
)
from .recursion import (
    denominator_negative_root,
    mean_partition,
    mean_partition_numeric,
    mean_partition_numeric_direct,
)
from .grand import (
    fixed_point_iterate,
    grand_partition,
    verify_functional_equation,
    zero_temp_grand_partition,
)
from .simulate import DEFAULT_SEED, choose_depth, mc_mean_z

USAGE_ERROR = 2


def _emit(text: str, out_path: str | None):
    if out_path:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text)
            if not text.endswith("\n"):
                fh.write("\n")
    else:
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")


def _load_law(path: str) -> BranchingLaw:
    return BranchingLaw.from_file(path)


def _parse_beta_grid(spec: str) -> list[float]:
    """Comma list ("0,0.5,1") or start:stop:step range, inclusive stop."""
    if ":" in spec:
        parts = spec.split(":")
        if len(parts) != 3:
            raise BranchGasError(f"grid must be start:stop:step, got {spec!r}")
        start, stop, step = (float(p) for p in parts)
        if step <= 0:
            raise BranchGasError("grid step must be positive")
        out = []
        b = start
        while b <= stop + 1e-12:
            out.append(round(b, 12))
            b += step
        return out
    return [float(p) for p in spec.split(",") if p.strip()]


def _parse_regular_q(text: str) -> int:
    value = text[2:] if text.startswith("q=") else text
    try:
        return int(value)
    except ValueError:
        raise BranchGasError(f"expected q=<int>, got {text!r}") from None


def _parse_costs(spec: str, skew: str | None) -> EnergyCosts:
    factor = parse_rational(skew) if skew else Fraction(1)
    kind, _, arg = spec.partition(":")
    kind = kind.strip().lower()
    if kind == "zero":
        return EnergyCosts.zero(per_particle_factor=factor)
    if kind == "linear":
        return EnergyCosts.linear(parse_rational(arg or "1"), per_particle_factor=factor)
    if kind in {"pairlog", "pair_log"}:
        return EnergyCosts.pair_log(parse_rational(arg or "2"), per_particle_factor=factor)
    if kind == "explicit":
        values = [parse_rational(v) for v in arg.split(",")]
        return EnergyCosts.explicit(values, per_particle_factor=factor)
    raise BranchGasError(f"unknown cost kind {kind!r} (zero | linear:c | pairlog:m | explicit:...)")


# ----------------------------------------------------------------------
# subcommands


def _cmd_meanz(args) -> int:
    law = _load_law(args.law)
    n = args.n
    if args.sweep is not None:
        grid = _parse_beta_grid(args.sweep)
        f = mean_partition(law, n)
        rows = ["beta,value,status"]
        for b in grid:
            try:
                rows.append(f"{b:g},{f.evaluate(b):.17g},ok")
            except BranchGasError:
                rows.append(f"{b:g},,pole")
        _emit("\n".join(rows), args.out)
        return 0
    if args.numeric_only:
        if args.beta is None:
            raise BranchGasError("--numeric-only needs --beta")
        value = mean_partition_numeric_direct(law, n, args.beta)
        _emit(f"{value:.12g}", args.out)
        return 0
    f = mean_partition(law, n)
    if args.json is not None or args.out:
        payload = {
            "law": law.to_json()["law"],
            "n": n,
            "value": f.to_json(),
            "denominator_roots_hint": denominator_negative_root(law, n),
        }
        if args.beta is not None:
            payload["beta"] = args.beta
            payload["numeric"] = f.evaluate(args.beta)
        _emit(json.dumps(payload, indent=2, sort_keys=True), args.json or args.out)
        return 0
    if args.beta is not None:
        numeric = f.evaluate(args.beta)
        # exact substitution is rational for integer beta; keep the
        # exponents small enough that big-integer powers stay instant
        if args.beta == int(args.beta) and abs(args.beta) <= 6:
            exact = f.evaluate_exact(rational_point(f.variables(), int(args.beta)))
            _emit(f"{exact} ~= {numeric:.6g}", None)
        else:
            _emit(f"{numeric:.12g}", None)
    else:
        _emit(str(f), None)
    return 0


def _cmd_gcpf(args) -> int:
    law = _load_law(args.law)
    order = args.order
    if args.verify:
        rep = verify_functional_equation(law, order)
        print(rep.summary(), file=sys.stderr)
        _emit(json.dumps(rep.to_json(), indent=2, sort_keys=True), args.out)
        return 0 if rep.passed else 1
    if args.fixed_point:
        series = fixed_point_iterate(law, order)
        reference = grand_partition(law, order).series
        agree = all(a == b for a, b in zip(series.coeffs, reference.coeffs))
        payload = {
            "order": order,
            "agrees_with_recursion": agree,
            "coefficients": [c.to_json() for c in series.coeffs],
        }
        _emit(json.dumps(payload, indent=2, sort_keys=True), args.out)
        return 0 if agree else 1
    if args.beta_inf:
        series = zero_temp_grand_partition(law, order)
        payload = {
            "order": order,
            "coefficients": [str(c.as_fraction()) for c in series.coeffs],
        }
        _emit(json.dumps(payload, indent=2, sort_keys=True), args.out)
        return 0
    series = grand_partition(law, order).series
    payload = {"order": order, "coefficients": [c.to_json() for c in series.coeffs]}
    _emit(json.dumps(payload, indent=2, sort_keys=True), args.out)
    return 0


def _cmd_mc(args) -> int:
    law = _load_law(args.law)
    depth = args.depth
    if depth is None:
        depth = choose_depth(law, args.n, args.beta, tol=args.adaptive_tol, seed=args.seed)
        print(f"adaptive depth: {depth}", file=sys.stderr)
    est = mc_mean_z(
        law, args.n, args.beta, args.samples, depth, seed=args.seed, threads=args.threads
    )
    if args.json or args.out:
        _emit(json.dumps(est.to_json(), indent=2, sort_keys=True), args.out)
    else:
        _emit(
            f"mean={est.mean:.10g} std_error={est.std_error:.4g} "
            f"width_max={est.enclosure_width_max:.4g} samples={est.samples} "
            f"depth={est.depth} seed={est.seed}",
            None,
        )
    return 0


def _cmd_quad(args) -> int:
    if args.regular is not None:
        rep = verify_regular_quadratic(_parse_regular_q(args.regular), args.nmax)
        print(rep.summary(), file=sys.stderr)
        _emit(json.dumps(rep.to_json(), indent=2, sort_keys=True), args.out)
        return 0 if rep.passed else 1
    if args.qpower is not None:
        rep = verify_power_identity(_parse_regular_q(args.qpower), args.order)
        print(rep.summary(), file=sys.stderr)
        _emit(json.dumps(rep.to_json(), indent=2, sort_keys=True), args.out)
        return 0 if rep.passed else 1
    if args.glued is not None:
        host = _load_law(args.glued[0])
        attached = _load_law(args.glued[1])
        costs = _parse_costs(args.costs, args.skew)
        sys_ = GluedSystem(host=host, attached=attached, costs=costs, n_particles=args.n)
        occ = occupation_expectation(sys_, args.beta)
        rep = verify_glued_recurrence(sys_, beta=args.beta)
        payload = {"occupancy": occ, "recurrence": rep.to_json()}
        print(rep.summary(), file=sys.stderr)
        _emit(json.dumps(payload, indent=2, sort_keys=True), args.out)
        return 0 if rep.passed else 1
    if args.conjecture is not None:
        law = _load_law(args.conjecture)
        report = occupation_conjecture_report(
            law, args.beta, args.n, n_samples=args.samples, depth=args.depth or 8,
            seed=args.seed,
        )
        _emit(json.dumps(report, indent=2, sort_keys=True), args.out)
        return 0
    raise BranchGasError("quad needs one of --regular, --qpower, --glued, --conjecture")


def _cmd_verify_all(args) -> int:
    law = _load_law(args.law)
    reports = []
    reports.append(verify_functional_equation(law, args.order))

    fp = fixed_point_iterate(law, min(args.order, 8))
    ref = grand_partition(law, min(args.order, 8)).series
    fp_ok = all(a == b for a, b in zip(fp.coeffs, ref.coeffs))
    reports.append(
        _mk_report("fixed-point-agreement", fp_ok, None if fp_ok else 0)
    )

    from .recursion import factorial_reference, mean_partition_at_zero

    zero_ok = all(
        mean_partition_at_zero(law, n) == factorial_reference(n)
        for n in range(args.nmax + 1)
    )
    reports.append(_mk_report("beta-zero-factorial", zero_ok, None if zero_ok else 0))

    glued_reports = [
        verify_glued_recurrence(GluedSystem(law, law, EnergyCosts.zero(), n))
        for n in range(args.nmax + 1)
    ]
    glued_ok = all(r.passed for r in glued_reports)
    reports.append(_mk_report("glued-recurrence-zero-costs", glued_ok, None if glued_ok else 0))

    if len(law.entries) == 1:
        q = law.entries[0][0]
        reports.append(verify_regular_quadratic(q, args.nmax))
        reports.append(verify_power_identity(q, args.order))

    for rep in reports:
        print(rep.summary(), file=sys.stderr)
    passed = all(r.passed for r in reports)
    payload = {"pass": passed, "suites": [r.to_json() for r in reports]}
    _emit(json.dumps(payload, indent=2, sort_keys=True), args.out)
    return 0 if passed else 1


def _mk_report(name: str, ok: bool, first):
    from .report import Report

    return Report(name=name, passed=ok, first_failure=first, residuals=("0",) if ok else ("?",))


# ----------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="branchgas",
        description="Partition functions of log-repelling particles on random branching trees",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("meanz", help="mean canonical partition function")
    p.add_argument("--law", required=True, help="law JSON file")
    p.add_argument("--n", type=int, required=True, help="particle count")
    p.add_argument("--beta", type=float, default=None)
    p.add_argument("--json", nargs="?", const="", default=None, metavar="PATH",
                   help="JSON output (to PATH, or stdout without a value)")
    p.add_argument("--sweep", default=None, metavar="GRID",
                   help="CSV over a beta grid: comma list or start:stop:step")
    p.add_argument("--numeric-only", action="store_true",
                   help="run the recursion in doubles at --beta (no symbols)")
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_meanz)

    p = sub.add_parser("gcpf", help="grand-canonical series and checks")
    p.add_argument("--law", required=True)
    p.add_argument("--order", type=int, default=8)
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--verify", action="store_true", help="functional-equation residuals")
    mode.add_argument("--fixed-point", action="store_true", help="iterate from 1+t")
    mode.add_argument("--beta-inf", action="store_true", help="zero-temperature limit")
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_gcpf)

    p = sub.add_parser("mc", help="Monte Carlo estimate of the mean partition function")
    p.add_argument("--law", required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--samples", type=int, default=10000)
    p.add_argument("--depth", type=int, default=None, help="truncation depth (default adaptive)")
    p.add_argument("--adaptive-tol", type=float, default=1e-6)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--json", action="store_true")
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_mc)

    p = sub.add_parser("quad", help="quadratic recurrences and glued systems")
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--regular", metavar="q=Q", help="regular-tree recurrence check")
    mode.add_argument("--qpower", metavar="q=Q", help="power identity check")
    mode.add_argument("--glued", nargs=2, metavar=("HOST.json", "ATTACHED.json"))
    mode.add_argument("--conjecture", metavar="LAW.json")
    p.add_argument("--nmax", type=int, default=10)
    p.add_argument("--order", type=int, default=8)
    p.add_argument("--n", type=int, default=4)
    p.add_argument("--beta", type=float, default=1.0)
    p.add_argument("--costs", default="zero", help="zero | linear:c | pairlog:m | explicit:a,b,...")
    p.add_argument("--skew", default=None, help="per-particle rational weight on the attached tree")
    p.add_argument("--samples", type=int, default=0, help="conjecture: add an MC cross-estimate")
    p.add_argument("--depth", type=int, default=None)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_quad)

    p = sub.add_parser("verify-all", help="run every verification suite for a law")
    p.add_argument("--law", required=True)
    p.add_argument("--nmax", type=int, default=8)
    p.add_argument("--order", type=int, default=8)
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_verify_all)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except BranchGasError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR


if __name__ == "__main__":
    sys.exit(main())


__all__ = ["build_parser", "main"]
