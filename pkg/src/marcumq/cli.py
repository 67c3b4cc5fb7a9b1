"""Command-line interface: ``marcumq {eval,fit,regress,error-curve,connectivity}``.

Exit codes: 0 success, 2 usage or domain error, 3 convergence failure,
4 rank-deficient regression.
"""

import argparse
import csv
import datetime
import json
import math
import sys

from . import __version__
from .approximation import (
    ApproxParams,
    analytic_params_small_a,
    discrete_error,
    published_poly_params,
    q_tilde,
)
from .calibration import (
    INIT_ANALYTIC,
    INIT_PREVIOUS,
    FitConfig,
    fit_grid,
    fit_single,
    format_float,
    read_fit_table,
    regress_poly,
    write_fit_table,
    write_regression,
)
from .connectivity import (
    APPROX,
    EXACT,
    Scenario,
    connection_mass_closed_form,
    connection_mass_numeric,
    pair_connectivity,
)
from .errors import ConvergenceError, DomainError, RankDeficiencyError
from .special import marcum_q1

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_CONVERGENCE = 3
EXIT_RANK = 4


class CliError(Exception):
    def __init__(self, message, code=EXIT_USAGE):
        super().__init__(message)
        self.code = code


def parse_values(text):
    """Parse ``start:stop:step``, a comma list, or a single number.

    Ranges include ``stop`` when it is reached within 1e-12.
    """
    try:
        if ":" in text:
            parts = [float(p) for p in text.split(":")]
            if len(parts) != 3:
                raise ValueError
            start, stop, step = parts
            if step <= 0 or stop < start:
                raise CliError(f"bad range {text!r}: need step > 0 and stop >= start")
            n = int(math.floor((stop - start) / step + 1e-12))
            values = [round(start + i * step, 12) for i in range(n + 1)]
        else:
            values = [float(p) for p in text.split(",")]
    except ValueError:
        raise CliError(f"cannot parse values {text!r}") from None
    if any(not math.isfinite(v) or v < 0 for v in values):
        raise CliError(f"values must be finite and nonnegative: {text!r}")
    return values


def format_value(v):
    """12-digit, locale-independent rendering of a value in [0, 1]."""
    if v == 0 or abs(v) >= 0.1:
        return f"{v:.12f}"
    return f"{v:.11e}"


def write_manifest(out_path, command, parameters, outputs):
    manifest = {
        "command": command,
        "parameters": parameters,
        "tool_version": __version__,
        "outputs": list(outputs),
        "created": datetime.datetime.now(datetime.timezone.utc).isoformat(),
    }
    with open(f"{out_path}.manifest.json", "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _fit_config(args, init=INIT_ANALYTIC):
    try:
        return FitConfig(delta=args.delta, b_max=args.bmax, init=init)
    except DomainError as exc:
        raise CliError(str(exc)) from None


def cmd_eval(args):
    if args.a < 0 or args.b < 0:
        raise CliError("a and b must be nonnegative")

    def approx_value():
        if args.nu is not None or args.mu is not None:
            if args.nu is None or args.mu is None:
                raise CliError("--nu and --mu must be given together")
            params = ApproxParams(args.nu, args.mu)
        else:
            params = fit_single(args.a, _fit_config(args)).params
        return q_tilde(params, args.b)

    evaluators = {
        "exact": lambda: marcum_q1(args.a, args.b),
        "approx": approx_value,
        "poly": lambda: q_tilde(published_poly_params(args.a), args.b),
    }
    if not args.compare:
        print(format_value(evaluators[args.method]()))
        return EXIT_OK
    exact = evaluators["exact"]()
    print(f"exact  {format_value(exact)}")
    for name in ("approx", "poly"):
        value = evaluators[name]()
        print(f"{name:<6} {format_value(value)}  abs_diff {abs(value - exact):.6e}")
    return EXIT_OK


def cmd_fit(args):
    values = parse_values(args.a)
    init = INIT_PREVIOUS if args.init == "previous" else INIT_ANALYTIC
    results = fit_grid(sorted(values), _fit_config(args, init))
    write_fit_table(results, args.out)
    write_manifest(args.out, "fit",
                   {"a": values, "delta": args.delta, "bmax": args.bmax, "init": init},
                   [args.out])
    failed = [r.a for r in results if not r.converged]
    if failed:
        print(f"error: no convergence at a={failed}", file=sys.stderr)
        return EXIT_CONVERGENCE
    return EXIT_OK


def cmd_regress(args):
    try:
        rows = read_fit_table(args.table)
    except OSError as exc:
        raise CliError(f"cannot read {args.table}: {exc.strerror}") from None
    except ValueError as exc:
        raise CliError(str(exc)) from None
    if args.degree < 1:
        raise CliError("degree must be at least 1")
    try:
        results = {
            name: regress_poly([(r["a"], r[name]) for r in rows], args.degree)
            for name in ("mu", "nu")
        }
    except RankDeficiencyError as exc:
        raise CliError(str(exc), EXIT_RANK) from None
    write_regression(results, args.out)
    write_manifest(args.out, "regress", {"table": args.table, "degree": args.degree}, [args.out])
    return EXIT_OK


def cmd_error_curve(args):
    values = sorted(parse_values(args.a))
    if args.method == "analytic":
        rows = [(a, analytic_params_small_a(a)) for a in values]
    elif args.method == "poly":
        rows = [(a, published_poly_params(a)) for a in values]
    else:
        results = fit_grid(values, _fit_config(args, INIT_PREVIOUS))
        rows = [(r.a, r.params) for r in results]
    with open(args.out, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(("a", "nu", "mu", "error"))
        for a, p in rows:
            err = discrete_error(a, p, args.delta, args.bmax)
            writer.writerow([format_float(a), format_float(p.nu), format_float(p.mu), format_float(err)])
    write_manifest(args.out, "error-curve",
                   {"a": values, "method": args.method, "delta": args.delta, "bmax": args.bmax},
                   [args.out])
    return EXIT_OK


def cmd_connectivity(args):
    try:
        scenario = Scenario.from_json(args.scenario)
    except OSError as exc:
        raise CliError(f"cannot read {args.scenario}: {exc.strerror}") from None
    if args.method == "poly":
        params = published_poly_params(scenario.a)
    elif args.method == "analytic":
        params = analytic_params_small_a(scenario.a)
    else:
        params = fit_single(scenario.a, _fit_config(args)).params
    closed = connection_mass_closed_form(scenario, params)
    numeric_approx = connection_mass_numeric(scenario, APPROX, params, args.tol)
    numeric_exact = connection_mass_numeric(scenario, EXACT, tol=args.tol)
    result = {
        "scenario": scenario.to_dict(),
        "method": args.method,
        "params": {"nu": params.nu, "mu": params.mu},
        "closed_form": closed,
        "numeric_approx": numeric_approx,
        "identity_difference": abs(closed - numeric_approx),
        "numeric_exact": numeric_exact,
        "approximation_relative_error": abs(numeric_exact - closed) / numeric_exact
        if numeric_exact > 0 else None,
    }
    with open(args.out, "w") as fh:
        json.dump(result, fh, indent=2, sort_keys=True)
        fh.write("\n")
    outputs = [args.out]
    if args.profile:
        n = args.profile_points
        if n < 2:
            raise CliError("--profile-points must be at least 2")
        with open(args.profile, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(("r", "H_exact", "H_approx"))
            for i in range(n):
                r = scenario.r1 + (scenario.r2 - scenario.r1) * i / (n - 1)
                writer.writerow([
                    format_float(r),
                    format_float(pair_connectivity(scenario.K, scenario.alpha, r, EXACT)),
                    format_float(pair_connectivity(scenario.K, scenario.alpha, r, APPROX, params=params)),
                ])
        outputs.append(args.profile)
    write_manifest(args.out, "connectivity",
                   {"scenario": args.scenario, "method": args.method, "tol": args.tol}, outputs)
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(prog="marcumq", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add_grid(p):
        p.add_argument("--delta", type=float, default=1e-4, help="Riemann-sum step (default 1e-4)")
        p.add_argument("--bmax", type=float, default=12.0, help="upper b limit (default 12)")

    p = sub.add_parser("eval", help="evaluate Q1 or its approximation at one point")
    p.add_argument("--a", type=float, required=True)
    p.add_argument("--b", type=float, required=True)
    p.add_argument("--method", choices=("exact", "approx", "poly"), default="exact")
    p.add_argument("--compare", action="store_true", help="print all methods and differences")
    p.add_argument("--nu", type=float, help="explicit nu for --method approx")
    p.add_argument("--mu", type=float, help="explicit mu for --method approx")
    add_grid(p)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("fit", help="fit (nu, mu) over a grid of a values")
    p.add_argument("--a", required=True, help="start:stop:step, comma list or single value")
    p.add_argument("--init", choices=("previous", "analytic"), default="previous")
    p.add_argument("--out", default="fit_table.csv")
    add_grid(p)
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("regress", help="polynomial regression of a fit table")
    p.add_argument("--table", required=True)
    p.add_argument("--degree", type=int, default=4)
    p.add_argument("--out", default="regression.json")
    p.set_defaults(func=cmd_regress)

    p = sub.add_parser("error-curve", help="discrete error over a range of a")
    p.add_argument("--a", required=True)
    p.add_argument("--method", choices=("analytic", "fitted", "poly"), default="poly")
    p.add_argument("--out", default="error_curve.csv")
    add_grid(p)
    p.set_defaults(func=cmd_error_curve)

    p = sub.add_parser("connectivity", help="connection mass for a scenario JSON")
    p.add_argument("--scenario", required=True)
    p.add_argument("--method", choices=("poly", "fitted", "analytic"), default="poly")
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--out", default="connectivity.json")
    p.add_argument("--profile", help="also write an (r, H(r)) CSV here")
    p.add_argument("--profile-points", type=int, default=101)
    add_grid(p)
    p.set_defaults(func=cmd_connectivity)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except (DomainError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ConvergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONVERGENCE


if __name__ == "__main__":
    sys.exit(main())
