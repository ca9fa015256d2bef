"""Command-line interface.

Subcommands::

    classify      ergotropic transformation, mean work and entropy production
    distribution  exact joint distribution of work and dE_A as CSV
    sweep         statistics and TUR bounds along a parameter sweep as CSV
    regime-map    ergotropic transformation over an (omega_b, beta_a/beta_b) grid
    verify-ft     exact and Monte Carlo checks of the fluctuation theorems

Exit codes: 0 success, 2 invalid arguments or parameters, 3 failed verification.
"""
from __future__ import annotations

import argparse
import csv
import io
import sys
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .ergotropy import classify_unitary, ergotropic_unitary, regime_map
from .model import (BasisPermutation, EngineParams, ParameterError, UNITARY_NAMES,
                    cycle_notation, named_unitary, parse_cycles)
from .statistics import (cycle_statistics, detailed_ft_check, integral_ft_residual,
                         joint_distribution, work_marginal)
from .trajectory import sample_cycles
from .tur import SWEEP_PARAMETERS, snr_sweep

EXIT_OK, EXIT_USAGE, EXIT_FAILED = 0, 2, 3
MIN_MC_SAMPLES = 10_000
FT_TOLERANCE = 1e-8
MC_SIGMAS = 4.0

SWEEP_HEADER = ("sweep_value", "regime", "mean_work", "var_work", "mean_entropy", "snr",
                "bound_standard", "bound_swap", "bound_tight", "bound_loose",
                "gen_lhs", "gen_bound_tight", "gen_bound_loose")


def fmt(value) -> str:
    """17 significant digits, no negative zero."""
    if isinstance(value, str):
        return value
    value = float(value)
    if value == 0:
        value = 0.0
    return "%.17g" % value


def _positive_int(text):
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def _fraction(text):
    try:
        value = float(Fraction(text))
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a number or fraction: {text}") from None
    if not value > 0:
        raise argparse.ArgumentTypeError(f"expected a positive ratio, got {text}")
    return value


def _unitary_choice(text):
    if text == "auto" or text.lower() in UNITARY_NAMES or text.startswith("cycles:"):
        return text
    raise argparse.ArgumentTypeError(
        f"expected auto, {', '.join(UNITARY_NAMES)} or cycles:<text>, got {text!r}")


def _engine_args(parser):
    g = parser.add_argument_group("engine")
    g.add_argument("--omega-a", type=float, default=1.0)
    g.add_argument("--omega-b", type=float, default=0.75)
    g.add_argument("--beta-a", type=float, default=0.5)
    g.add_argument("--beta-b", type=float, default=4.0)
    g.add_argument("--dim-a", type=int, default=3)
    g.add_argument("--dim-b", type=int, default=3)


def _unitary_arg(parser):
    parser.add_argument("--unitary", type=_unitary_choice, default="auto",
                        help="auto (ergotropic), one of %s, or cycles:<1-based cycles>"
                             % ", ".join(UNITARY_NAMES))


def _output_arg(parser):
    parser.add_argument("--output", "-o", help="CSV destination (default: standard output)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ergotropic-otto",
        description="Exact statistics of two-stroke ergotropic Otto engines on two qudits.")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    p = sub.add_parser("classify", help="ergotropic transformation at one parameter point")
    _engine_args(p)

    p = sub.add_parser("distribution", help="exact p(W, dE_A) as CSV")
    _engine_args(p)
    _unitary_arg(p)
    p.add_argument("--marginal", action="store_true", help="merge over dE_A, columns w,probability")
    _output_arg(p)

    p = sub.add_parser("sweep", help="statistics and TUR bounds along a sweep as CSV")
    _engine_args(p)
    _unitary_arg(p)
    p.add_argument("--sweep", required=True, choices=SWEEP_PARAMETERS)
    p.add_argument("--from", dest="start", type=float, required=True)
    p.add_argument("--to", dest="stop", type=float, required=True)
    p.add_argument("--steps", type=_positive_int, required=True)
    p.add_argument("--scale", choices=("linear", "log"), default="linear")
    _output_arg(p)

    p = sub.add_parser("regime-map", help="ergotropic labels over (omega_b, beta_a/beta_b)")
    p.add_argument("--omega-a", type=float, default=1.0)
    p.add_argument("--beta-b", type=float, default=10.0)
    p.add_argument("--beta-ratio", type=_fraction, action="append", required=True,
                   help="beta_a / beta_b, e.g. 1/16; repeatable")
    p.add_argument("--from", dest="start", type=float, default=1e-3)
    p.add_argument("--to", dest="stop", type=float, default=10.0)
    p.add_argument("--steps", type=_positive_int, default=400)
    p.add_argument("--scale", choices=("linear", "log"), default="log")
    _output_arg(p)

    p = sub.add_parser("verify-ft", help="check integral and detailed fluctuation theorems")
    _engine_args(p)
    _unitary_arg(p)
    p.add_argument("--samples", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=0)
    return parser


def params_from(args) -> EngineParams:
    return EngineParams(args.omega_a, args.omega_b, args.beta_a, args.beta_b,
                        args.dim_a, args.dim_b)


def resolve_unitary(selector: str, params: EngineParams) -> BasisPermutation:
    if selector == "auto":
        return ergotropic_unitary(params).unitary
    if selector.startswith("cycles:"):
        return parse_cycles(selector[len("cycles:"):], params.size)
    return named_unitary(selector, params.dim_a, params.dim_b)


def grid(start: float, stop: float, steps: int, scale: str) -> np.ndarray:
    if steps < 1:
        raise ParameterError("a sweep needs at least one step")
    if scale == "log":
        if start <= 0 or stop <= 0:
            raise ParameterError("log-scale sweeps need positive endpoints")
        return np.geomspace(start, stop, steps)
    return np.linspace(start, stop, steps)


def _label(u: BasisPermutation) -> str:
    label = classify_unitary(u)
    return str(label) if label is not None else "Unclassified"


def _write_csv(args, header, rows, out):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([fmt(v) for v in row])
    if getattr(args, "output", None):
        with open(args.output, "w", newline="", encoding="utf-8") as fh:
            fh.write(buf.getvalue())
    else:
        out.write(buf.getvalue())


def cmd_classify(args, out) -> int:
    params = params_from(args)
    res = ergotropic_unitary(params)
    stats = cycle_statistics(params, res.unitary)
    label = str(res.regime) if res.regime is not None else "Unclassified"
    out.write(f"{label} {cycle_notation(res.unitary) or '()'}\n")
    out.write(f"mean_work {fmt(stats.mean_work)}\n")
    out.write(f"mean_entropy {fmt(stats.mean_entropy)}\n")
    return EXIT_OK


def cmd_distribution(args, out) -> int:
    params = params_from(args)
    joint = joint_distribution(params, resolve_unitary(args.unitary, params))
    if args.marginal:
        _write_csv(args, ("w", "probability"), work_marginal(joint), out)
    else:
        rows = [(a.work, a.delta_e_a, a.probability) for a in joint]
        _write_csv(args, ("w", "delta_e_a", "probability"), rows, out)
    return EXIT_OK


def cmd_sweep(args, out) -> int:
    base = params_from(args)
    values = grid(args.start, args.stop, args.steps, args.scale)
    if args.unitary == "auto":
        selection = "auto"
    else:
        selection = resolve_unitary(args.unitary, base)
    rows = []
    for row in snr_sweep(base, args.sweep, values, selection):
        r, b = row.report, row.report.bounds
        rows.append((row.sweep_value, row.regime, r.forward.mean_work, r.forward.var_work,
                     r.mean_entropy, r.snr, b["standard"].value, b["swap"].value,
                     b["tight"].value, b["loose"].value, r.generalized_lhs,
                     b["generalized_tight"].value, b["generalized_loose"].value))
    _write_csv(args, SWEEP_HEADER, rows, out)
    return EXIT_OK


def cmd_regime_map(args, out) -> int:
    values = grid(args.start, args.stop, args.steps, args.scale)
    points = regime_map(values, args.beta_ratio, omega_a=args.omega_a, beta_b=args.beta_b)
    rows = [(pt.omega_b, pt.beta_ratio, str(pt.regime)) for pt in points]
    _write_csv(args, ("omega_b", "beta_param", "regime"), rows, out)
    return EXIT_OK


def cmd_verify_ft(args, out) -> int:
    if args.samples < MIN_MC_SAMPLES:
        raise ParameterError(f"--samples must be at least {MIN_MC_SAMPLES}")
    params = params_from(args)
    u = resolve_unitary(args.unitary, params)
    detailed = detailed_ft_check(params, u)
    integral = integral_ft_residual(joint_distribution(params, u))
    mc = sample_cycles(params, u, args.samples, args.seed).exp_neg_entropy
    out.write(f"unitary {_label(u)} {cycle_notation(u) or '()'}\n")
    out.write(f"detailed_ft_max_rel_error {fmt(detailed)}\n")
    out.write(f"integral_ft_residual {fmt(integral)}\n")
    out.write(f"mc_exp_neg_entropy {fmt(mc.mean)} stderr {fmt(mc.stderr)} samples {args.samples}\n")
    failures = []
    if not detailed < FT_TOLERANCE:
        failures.append(f"detailed FT error {fmt(detailed)} >= {FT_TOLERANCE:g}")
    if not integral < FT_TOLERANCE:
        failures.append(f"integral FT residual {fmt(integral)} >= {FT_TOLERANCE:g}")
    dev = abs(mc.mean - 1)
    if dev > MC_SIGMAS * mc.stderr and not (mc.stderr == 0 and dev <= 1e-12):
        failures.append(f"Monte Carlo <exp(-Sigma)> off by {fmt(dev)} "
                        f"({fmt(dev / mc.stderr) if mc.stderr else 'inf'} standard errors)")
    for msg in failures:
        print(f"FAILED: {msg}", file=sys.stderr)
    out.write("PASS\n" if not failures else "FAIL\n")
    return EXIT_FAILED if failures else EXIT_OK


COMMANDS = {
    "classify": cmd_classify,
    "distribution": cmd_distribution,
    "sweep": cmd_sweep,
    "regime-map": cmd_regime_map,
    "verify-ft": cmd_verify_ft,
}


def main(argv: Optional[Sequence[str]] = None, out=None) -> int:
    out = sys.stdout if out is None else out
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    try:
        return COMMANDS[args.command](args, out)
    except ParameterError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
