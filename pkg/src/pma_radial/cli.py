"""Command-line entry point.

Exit codes: 0 when every check passes, 1 when any check fails or a
computation raises, 2 for usage errors (malformed flags, dimension out of
range).  Settings resolve as flags, then PMA_TOL / PMA_RMAX, then defaults.
"""
from __future__ import annotations

import argparse
import math
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor

from . import asymptotics, bounds, dim1, pde, radial
from .artifacts import atomic_write_text, dumps, report_document, write_solution_csv
from .constants import asymptotic_constants, characteristic_roots, check_dimension, growth_exponent
from .errors import DimensionOutOfRange, PMAError
from .solution import SolveConfig

DEFAULT_TOL = 1e-10
DEFAULT_RMAX = {
    "solve": 1e4,
    "verify-bounds": 1e4,
    "asymptotics": 1e6,
    "residual": 1e3,
    "dim1": 1e8,
    "report": 1e5,
}


class UsageError(Exception):
    pass


def _pair(text: str, kind=float) -> tuple:
    try:
        lo, hi = (kind(v) for v in text.split(":"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected lo:hi, got {text!r}") from None
    if not lo < hi and not (kind is int and lo == hi):
        raise argparse.ArgumentTypeError(f"need lo < hi in {text!r}")
    return lo, hi


def _int_pair(text: str):
    return _pair(text, int)


def _env_float(name: str):
    raw = os.environ.get(name)
    if raw is None or raw.strip() == "":
        return None
    try:
        return float(raw)
    except ValueError:
        raise UsageError(f"environment variable {name}={raw!r} is not a number") from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pma-radial", description="Radial solutions of -u_t det D^2 u = 1.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, n=True, rmax=True):
        if n:
            p.add_argument("--n", type=int, required=True, help="spatial dimension")
        if rmax:
            p.add_argument("--rmax", type=float, default=None, help="outer radius")
        p.add_argument("--tol", type=float, default=None, help="solver tolerance")
        p.add_argument("--out", default=None, help="artifact path")
        p.add_argument("--json", action="store_true", help="print JSON instead of a summary")
        return p

    p = sub.add_parser("constants", help="closed-form constants for one dimension")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--out", default=None)
    p.add_argument("--json", action="store_true")

    p = common(sub.add_parser("solve", help="certified reference profile; --out writes CSV"))
    p.add_argument("--m", type=int, default=1000, help="Euler segments used for certification")

    common(sub.add_parser("verify-bounds", help="a-priori, sandwich and iteration bounds"))

    p = common(sub.add_parser("asymptotics", help="leading ratios and the decay of the deviation"))
    p.add_argument("--fit-window", type=_pair, default=None, metavar="LO:HI", help="radius window of the fit")

    p = common(sub.add_parser("residual", help="PDE residual of w(t) phi(|x|) on a space-time grid"))
    p.add_argument("--tmin", type=float, default=-10.0)
    p.add_argument("--tmax", type=float, default=-0.01)

    common(sub.add_parser("dim1", help="the one-dimensional profile and its logarithmic limit"), n=False)

    p = common(sub.add_parser("report", help="aggregate manifest over a range of dimensions"), n=False)
    p.add_argument("--n-range", type=_int_pair, required=True, metavar="LO:HI", help="inclusive range of n")
    p.add_argument("--m", type=int, default=1000)
    p.add_argument("--jobs", type=int, default=1, help="worker processes")
    return parser


def _check(name, measured, expected, tolerance, source, passed) -> dict:
    return {
        "name": name,
        "measured": measured,
        "expected": expected,
        "tolerance": tolerance,
        "source": source,
        "pass": bool(passed),
    }


# ---- subcommands: each returns (report, passed, csv_solution_or_None)


def cmd_constants(args):
    report = {"n": args.n, **asymptotic_constants(args.n).to_dict()}
    return report, True, None


def cmd_solve(args):
    if args.n == 1:
        sol = dim1.solve_dim1(args.rmax, args.tol)
        energy = dim1.energy_residual(sol)
        report = {"n": 1, "knots": int(sol.knots.size), "r_max": sol.r_max, "phi_at_rmax": float(sol.phi[-1]),
                  "energy_residual_max": energy}
        return report, energy <= 1e-9 and not sol.check_invariants(1e-12), sol
    sol = radial.solve(SolveConfig(n=args.n, r_max=args.rmax, tol=args.tol, m_euler=args.m))
    problems = sol.check_invariants(1e-12)
    report = {
        "n": args.n,
        "knots": int(sol.knots.size),
        "r_max": sol.r_max,
        "phi_at_rmax": float(sol.phi[-1]),
        "ratio_at_rmax": float(sol.phi[-1] / sol.r_max ** growth_exponent(args.n)),
        "defect": sol.defect,
        "defect_radius": sol.defect_radius,
        "certificate": sol.certificate.to_dict(),
        "invariant_problems": problems,
    }
    return report, sol.certificate.admissible and not problems, sol


def _bounds_report(n, r_max, tol):
    sol = radial.integrate_reference(SolveConfig(n=n, r_max=r_max, tol=tol))
    sandwich = bounds.verify_sandwich(sol, tol)
    apriori = radial.apriori_bounds_check(sol, 10 * tol)
    _, trace = bounds.iterate_bounds(n, 30)
    trace_ok = bounds.trace_bounds_hold(sol, trace, 10 * tol)
    report = {**sandwich.to_dict(), "apriori_pass": apriori, "iteration_trace_pass": trace_ok}
    report["pass"] = bool(sandwich.passed and apriori and trace_ok)
    return report


def cmd_verify_bounds(args):
    if args.n < 2:
        raise DimensionOutOfRange("verify-bounds needs n >= 2")
    report = {"n": args.n, **_bounds_report(args.n, args.rmax, args.tol)}
    return report, report["pass"], None


def _asymptotics_checks(n, sol, report):
    checks = []
    if sol.r_max < 1e4:
        pass  # too short for any tail property
    elif n >= 4:
        lam = characteristic_roots(n)[0]
        checks.append(_check("decay_exponent", report["fitted_exponent"], lam.real, 0.04, "closed-form",
                             abs(report["fitted_exponent"] - lam.real) <= 0.04))
        checks.append(_check("decay_frequency", report["fitted_frequency"], abs(lam.imag), 0.05, "closed-form",
                             abs(report["fitted_frequency"] - abs(lam.imag)) <= 0.05))
    else:
        dev = asymptotics.deviation_trace(sol)
        sel = dev.radii >= sol.r_max / 100
        env = asymptotics.ratio_deviation_envelope(dev)[sel]
        checks.append(_check("deviation_envelope_non_increasing", bool(asymptotics.is_non_increasing(env, 1e-9)),
                             True, None, "property", asymptotics.is_non_increasing(env, 1e-9)))
    ratio_dev = abs(report["ratio_at_rmax"] / report["c_n"] - 1)
    checks.append(_check("ratio0_relative_deviation", ratio_dev, 0.0, 0.01, "closed-form", ratio_dev <= 0.01))
    return checks


def cmd_asymptotics(args):
    sol = radial.integrate_reference(SolveConfig(n=args.n, r_max=args.rmax, tol=args.tol))
    report = asymptotics.asymptotics_report(sol, args.fit_window)
    report["checks"] = _asymptotics_checks(args.n, sol, report)
    return report, all(c["pass"] for c in report["checks"]), None


def _residual_report(n, r_max, tol, t_min, t_max):
    sol = radial.integrate_reference(SolveConfig(n=n, r_max=r_max, tol=tol))
    grid = pde.SpaceTimeGrid.geometric(min(0.1, r_max / 10), r_max, t_min, t_max)
    report = pde.residual_report(sol, grid)
    report["pass"] = bool(report["max_abs_residual"] <= 1e-6 and report["convexity_pass"] and report["ut_bounded"] is False)
    return report


def cmd_residual(args):
    if not args.tmin < args.tmax < 0:
        raise UsageError("need tmin < tmax < 0")
    report = {"n": args.n, **_residual_report(args.n, args.rmax, args.tol, args.tmin, args.tmax)}
    return report, report["pass"], None


def cmd_dim1(args):
    sol = dim1.solve_dim1(args.rmax, args.tol)
    report = dim1.dim1_report(sol)
    passed = (
        report["energy_residual_max"] <= 1e-9
        and abs(report["extrapolated_limit"] - 2) <= 0.05
        and report["monotone_approach"]
    )
    report["pass"] = bool(passed)
    return report, passed, None


def _report_one(n, r_max, tol, m):
    """Sandwich, residual and asymptotics for one dimension (runs in a worker)."""
    timings = {}
    t0 = time.perf_counter()
    sol = radial.solve(SolveConfig(n=n, r_max=r_max, tol=tol, m_euler=m))
    timings["solve"] = time.perf_counter() - t0
    checks = [_check("gronwall_certificate", sol.certificate.sup_distance, 0.0, sol.certificate.bound, "property",
                     sol.certificate.admissible)]

    t0 = time.perf_counter()
    sandwich = bounds.verify_sandwich(sol, tol)
    checks.append(_check("sandwich", min(sandwich.worst_margin_lower, sandwich.worst_margin_upper), 0.0,
                         10 * tol, "closed-form", sandwich.passed))
    timings["bounds"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    grid = pde.SpaceTimeGrid.geometric(0.1, min(1e3, r_max))
    res = pde.residual_report(sol, grid)
    checks.append(_check("pde_residual", res["max_abs_residual"], 0.0, 1e-6, "property",
                         res["max_abs_residual"] <= 1e-6))
    checks.append(_check("parabolic_convexity", res["convexity_pass"], True, None, "property", res["convexity_pass"]))
    timings["residual"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    if r_max >= 1e4:
        asym = asymptotics.asymptotics_report(sol)
        checks.extend(_asymptotics_checks(n, sol, asym))
    timings["asymptotics"] = time.perf_counter() - t0
    return n, checks, timings


def cmd_report(args):
    lo, hi = args.n_range
    if lo < 2:
        raise DimensionOutOfRange("report needs n >= 2 (use the dim1 command for n = 1)")
    dims = list(range(lo, hi + 1))
    jobs = [(n, args.rmax, args.tol, args.m) for n in dims]
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(_report_one, *zip(*jobs)))
    else:
        results = [_report_one(*j) for j in jobs]
    per_n = {str(n): {"checks": checks} for n, checks, _ in results}
    report = {
        "config": {"n_range": [lo, hi], "r_max": args.rmax, "tol": args.tol, "m": args.m},
        "dimensions": per_n,
        "all_pass": all(c["pass"] for _, checks, _ in results for c in checks),
    }
    report["_timings"] = {str(n): t for n, _, t in results}
    return report, report["all_pass"], None


COMMANDS = {
    "constants": cmd_constants,
    "solve": cmd_solve,
    "verify-bounds": cmd_verify_bounds,
    "asymptotics": cmd_asymptotics,
    "residual": cmd_residual,
    "dim1": cmd_dim1,
    "report": cmd_report,
}


def _resolve(args):
    if hasattr(args, "rmax"):
        env = _env_float("PMA_RMAX")
        if args.rmax is None:
            args.rmax = env if env is not None else DEFAULT_RMAX[args.command]
        if not (args.rmax > 0 and math.isfinite(args.rmax)):
            raise UsageError("--rmax must be a positive number")
    if hasattr(args, "tol"):
        env = _env_float("PMA_TOL")
        if args.tol is None:
            args.tol = env if env is not None else DEFAULT_TOL
        if not 1e-14 < args.tol < 1e-2:
            raise UsageError("--tol must lie in (1e-14, 1e-2)")
    if getattr(args, "m", 2) < 2:
        raise UsageError("--m must be at least 2")
    if getattr(args, "jobs", 1) < 1:
        raise UsageError("--jobs must be at least 1")


def _summary(command, report, passed) -> str:
    lines = [f"{command}: {'PASS' if passed else 'FAIL'}"]
    for key, value in report.items():
        if key.startswith("_") or isinstance(value, (dict, list)):
            continue
        if isinstance(value, float):
            value = f"{value:.10g}"
        lines.append(f"  {key}: {value}")
    for check in report.get("checks", []):
        lines.append(f"  [{'ok' if check['pass'] else 'FAIL'}] {check['name']}: {check['measured']}")
    for n, block in report.get("dimensions", {}).items():
        for check in block["checks"]:
            lines.append(f"  n={n} [{'ok' if check['pass'] else 'FAIL'}] {check['name']}: {check['measured']}")
    return "\n".join(lines)


def run_command(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        _resolve(args)
        if hasattr(args, "n"):
            # validate up front so a bad dimension is a usage error, not a failure
            check_dimension(args.n, 1)
        report, passed, sol = COMMANDS[args.command](args)
    except (UsageError, DimensionOutOfRange) as exc:
        print(f"pma-radial {args.command}: usage error: {exc}", file=sys.stderr)
        return 2
    except (PMAError, ValueError, ArithmeticError) as exc:
        print(f"pma-radial {args.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1

    timings = report.pop("_timings", None)
    doc = report_document(report, argv)
    if timings is not None:
        doc["metadata"]["stage_seconds"] = timings
    try:
        if args.out:
            if sol is not None:
                write_solution_csv(sol, args.out)
            else:
                atomic_write_text(args.out, dumps(doc))
    except OSError as exc:
        print(f"pma-radial {args.command}: {exc}", file=sys.stderr)
        return 1
    if args.json:
        sys.stdout.write(dumps(doc))
    else:
        print(_summary(args.command, report, passed))
    return 0 if passed else 1


def main() -> None:  # console-script hook
    sys.exit(run_command())

