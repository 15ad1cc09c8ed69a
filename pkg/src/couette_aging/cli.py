"""Command-line driver for the aging-fluid Couette solver.

Exit codes: 0 success, 1 validation error, 2 numerical divergence,
3 rate-check failure (``preset`` only).
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import io
from .core import SCALES, DivergenceError, Parameters, ValidationError
from .diagnostics import fit_exponential, fit_power_law, LOG_FLOOR
from .equilibria import linearized_rate, steady_homogeneous, steady_nonhomogeneous, steady_piecewise
from .ode import ode_run
from .presets import PRESETS, run_preset
from .scheme import run

EXIT_OK, EXIT_VALIDATION, EXIT_DIVERGENCE, EXIT_RATES = 0, 1, 2, 3


def _window(text: str) -> tuple[float, float]:
    try:
        lo, hi = (float(x) for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"window must be 'lo,hi' (got {text!r})")
    return lo, hi


def _add_param_flags(ap: argparse.ArgumentParser) -> None:
    defaults = Parameters()
    ap.add_argument("--rho", type=float, default=defaults.rho)
    ap.add_argument("--eta", type=float, default=defaults.eta)
    ap.add_argument("--lambda", dest="lam", type=float, default=defaults.lam)
    ap.add_argument("--g-mod", type=float, default=defaults.g_mod)
    ap.add_argument("--xi", type=float, default=defaults.xi)
    ap.add_argument("--nu", type=float, default=defaults.nu)


def _params(args) -> Parameters:
    return Parameters(rho=args.rho, eta=args.eta, lam=args.lam, g_mod=args.g_mod, xi=args.xi, nu=args.nu)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="couette-aging", description=__doc__.splitlines()[0])
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="integrate a JSON-configured run and emit diagnostics CSV")
    p_run.add_argument("--config", required=True)
    p_run.add_argument("--scale", choices=sorted(SCALES), default="desk")
    p_run.add_argument("--output", help="CSV path (default: config output_path, else stdout)")

    p_steady = sub.add_parser("steady", help="steady state and stability report as JSON")
    _add_param_flags(p_steady)
    p_steady.add_argument("--a", type=float, default=1.0)
    p_steady.add_argument("--beta-inf", type=float)
    p_steady.add_argument("--f0", type=float, help="initial fluidity for the m_f bound")
    p_steady.add_argument("--c", type=float, default=0.0, help="rest stress when a = 0")

    p_ode = sub.add_parser("ode", help="0D trajectory as CSV")
    _add_param_flags(p_ode)
    p_ode.add_argument("--a", type=float, default=1.0)
    p_ode.add_argument("--tau0", type=float, default=0.5)
    p_ode.add_argument("--f0", type=float, default=0.5)
    p_ode.add_argument("--dt", type=float, default=0.01)
    p_ode.add_argument("--t-end", type=float, default=40.0)
    p_ode.add_argument("--output")

    p_rates = sub.add_parser("rates", help="fit a decay rate on a CSV column")
    p_rates.add_argument("--input", required=True)
    p_rates.add_argument("--column", required=True, help="column name; 'a+b' sums columns")
    p_rates.add_argument("--model", choices=("power", "exp"), required=True)
    p_rates.add_argument("--window", type=_window, required=True, help="lo,hi")
    p_rates.add_argument("--floor", type=float, default=LOG_FLOOR)

    p_preset = sub.add_parser("preset", help="run a figure experiment and check its rates")
    p_preset.add_argument("name", choices=PRESETS)
    p_preset.add_argument("--scale", choices=sorted(SCALES), default="desk")
    p_preset.add_argument("--out-dir", default=None, help="directory for per-run CSVs and summary.json")
    return ap


def _cmd_run(args) -> int:
    cfg = io.load_config(args.config, scale=args.scale)
    _, records = run(cfg)
    target = args.output or cfg.output_path
    if target:
        io.write_records_csv(records, target)
    else:
        io.write_records_csv(records, stream=sys.stdout)
    return EXIT_OK


def _cmd_steady(args) -> int:
    p = _params(args)
    out: dict = {"params": p.to_dict(), "a": args.a}
    if args.a == 0:
        ss = steady_homogeneous(args.c)
    elif args.beta_inf is not None:
        ss = steady_piecewise(p, args.a, args.beta_inf)
    else:
        ss = steady_nonhomogeneous(p, args.a)
    out["steady"] = ss.to_dict()
    out["tau_inf"] = ss.tau
    out["f_inf"] = ss.f
    if args.a > 0:
        report = linearized_rate(p, args.a, args.f0)
        out["stability"] = report.to_dict()
        out["c_r"] = report.c_r
    json.dump(out, sys.stdout, indent=2)
    sys.stdout.write("\n")
    return EXIT_OK


def _cmd_ode(args) -> int:
    p = _params(args)
    ss = steady_nonhomogeneous(p, args.a)
    traj = ode_run(p, args.a, args.tau0, args.f0, args.dt, args.t_end)
    if args.output:
        io.write_ode_csv(traj, args.output, ss.tau, ss.f)
    else:
        io.write_ode_csv(traj, None, ss.tau, ss.f, stream=sys.stdout)
    return EXIT_OK


def _cmd_rates(args) -> int:
    cols = io.read_csv_columns(args.input)
    if "t" not in cols:
        raise ValidationError(f"{args.input} has no 't' column")
    try:
        v = io.select_column(cols, args.column)
    except KeyError as exc:
        raise ValidationError(str(exc.args[0])) from exc
    fitter = fit_power_law if args.model == "power" else fit_exponential
    try:
        fit = fitter(cols["t"], v, args.window, floor=args.floor)
    except ValueError as exc:
        raise ValidationError(str(exc)) from exc
    json.dump(fit.to_dict(), sys.stdout, indent=2)
    sys.stdout.write("\n")
    return EXIT_OK


def _cmd_preset(args) -> int:
    result = run_preset(args.name, args.scale, args.out_dir)
    summary = result.to_dict()
    text = json.dumps(summary, indent=2)
    if args.out_dir:
        Path(args.out_dir, "summary.json").write_text(text + "\n")
    sys.stdout.write(text + "\n")
    for check in result.checks:
        if not check.passed:
            print(f"rate check failed: {check.name}: value={check.value:.6g}", file=sys.stderr)
    return EXIT_OK if result.passed else EXIT_RATES


COMMANDS = {"run": _cmd_run, "steady": _cmd_steady, "ode": _cmd_ode, "rates": _cmd_rates, "preset": _cmd_preset}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except DivergenceError as exc:
        print(f"divergence: {exc}", file=sys.stderr)
        return EXIT_DIVERGENCE


if __name__ == "__main__":
    sys.exit(main())
