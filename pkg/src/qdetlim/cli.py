"""Command-line front end: bounds, receivers, sweeps and a self-test battery.

Exit codes: 0 success, 1 numerical failure, 2 configuration error; no other
codes are produced.  Structured results are JSON (validated against the
shipped output schema before emission); sweeps are RFC-4180 CSV.
"""

from __future__ import annotations

import argparse
import dataclasses
import sys

from ._version import __version__
from .errors import NumericsError, ValidationError
from .scenario import (
    MODES,
    RECEIVER_NAMES,
    dumps_output,
    load_scenario,
    run_bounds,
    run_receivers,
    run_sweep,
    sweep_csv,
    validate_run_output,
)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qdetlim",
        description=(
            "Quantum limits on waveform detection for linear (optomechanical) "
            "detectors: fidelity bounds, error exponents and receiver simulations."
        ),
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_run_flags(p, default_format):
        p.add_argument("--scenario", required=True, help="path to a scenario JSON file")
        p.add_argument("--out", help="output file (default: stdout)")
        p.add_argument(
            "--format",
            choices=("json", "csv"),
            default=default_format,
            help=f"output format (default: {default_format})",
        )
        p.add_argument("--trials", type=int, help="override the scenario's Monte Carlo trials")
        p.add_argument("--seed", type=int, help="override the scenario's seed")
        p.add_argument(
            "--strict",
            action="store_true",
            help="escalate bandwidth warnings to numerical errors",
        )

    p_bounds = sub.add_parser("bounds", help="fidelity, Bayes bound, trade-off curve, exponent")
    add_run_flags(p_bounds, "json")

    p_recv = sub.add_parser("receivers", help="receiver performance, analytic and Monte Carlo")
    add_run_flags(p_recv, "json")
    p_recv.add_argument(
        "--which",
        default=",".join(RECEIVER_NAMES),
        help="comma-separated subset of: " + ", ".join(RECEIVER_NAMES),
    )
    p_recv.add_argument("--mode", choices=MODES, default="analytic")

    p_sweep = sub.add_parser("sweep", help="bounds and exponents over a parameter range (CSV)")
    add_run_flags(p_sweep, "csv")
    p_sweep.add_argument(
        "--param", required=True, help="dotted path of a scalar field, e.g. detector.s_eta_excess"
    )
    p_sweep.add_argument(
        "--values", required=True, help="comma-separated numeric values, e.g. 1,2,4"
    )

    sub.add_parser("selftest", help="run the reduced-scale oracle battery")
    return parser


def _emit(text: str, out_path, *, newline="\n") -> None:
    if out_path:
        with open(out_path, "w", encoding="utf-8", newline=newline) as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _load_with_overrides(args):
    sc = load_scenario(args.scenario)
    updates = {}
    if args.trials is not None:
        if args.trials < 1:
            raise ValidationError("--trials must be >= 1")
        updates["trials"] = args.trials
    if args.seed is not None:
        if args.seed < 0:
            raise ValidationError("--seed must be >= 0")
        updates["seed"] = args.seed
    return dataclasses.replace(sc, **updates) if updates else sc


def _require_format(args, expected: str) -> None:
    if args.format != expected:
        raise ValidationError(
            f"subcommand {args.command!r} emits {expected} only; got --format {args.format}"
        )


def _parse_values(text: str) -> list[float]:
    try:
        return [float(tok) for tok in text.split(",") if tok.strip() != ""]
    except ValueError as exc:
        raise ValidationError(f"--values must be comma-separated numbers: {exc}") from exc


def _cmd_bounds(args) -> int:
    _require_format(args, "json")
    doc = run_bounds(_load_with_overrides(args), strict=args.strict)
    validate_run_output(doc)
    _emit(dumps_output(doc), args.out)
    return 0


def _cmd_receivers(args) -> int:
    _require_format(args, "json")
    which = tuple(tok.strip() for tok in args.which.split(",") if tok.strip())
    doc = run_receivers(_load_with_overrides(args), which, args.mode, strict=args.strict)
    validate_run_output(doc)
    _emit(dumps_output(doc), args.out)
    return 0


def _cmd_sweep(args) -> int:
    _require_format(args, "csv")
    rows = run_sweep(
        _load_with_overrides(args), args.param, _parse_values(args.values), strict=args.strict
    )
    _emit(sweep_csv(rows), args.out, newline="")
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "bounds":
            return _cmd_bounds(args)
        if args.command == "receivers":
            return _cmd_receivers(args)
        if args.command == "sweep":
            return _cmd_sweep(args)
        from .selftest import run_selftest

        return run_selftest()
    except ValidationError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except NumericsError as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return 1


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
