"""Command-line front end.

Subcommands: ``analyze``, ``scan``, ``rho-delta``, ``recommend`` and
``verify``. Exit status is 0 on success, 1 on bad input and 2 when a
verification check fails.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import serialization
from .channel import ChannelError, StandardChannel, load_channel, parse_strategy
from .optimality import applicable_certificates, recommend
from .rates import rate_of
from .scanner import AxisRange, ScanError, ScanSpec, boundary_trace, curve_csv, drange, rho_delta_curve, scan
from .verification import SUITES, run_suite

EXIT_OK, EXIT_INPUT, EXIT_VERIFY = 0, 1, 2


class InputError(Exception):
    """Bad command-line input; reported in one line with exit code 1."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise InputError(message)


def db_to_linear(db: float) -> float:
    return 10.0 ** (db / 10.0)


def _floats(text: str, flag: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise InputError(f"{flag}: expected comma-separated numbers, got {text!r}") from None


def _positive(text: str) -> float:
    v = float(text)
    if not v > 0:
        raise argparse.ArgumentTypeError("must be positive")
    return v


def _add_power_flags(p):
    g = p.add_mutually_exclusive_group()
    g.add_argument("--powers", help="override powers P_1..P_K (linear, comma-separated; one value sets all)")
    g.add_argument("--powers-db", help="override powers in dB")


def _apply_powers(ch: StandardChannel, args) -> StandardChannel:
    if args.powers is None and args.powers_db is None:
        return ch
    if args.powers is not None:
        vals = _floats(args.powers, "--powers")
    else:
        vals = [db_to_linear(v) for v in _floats(args.powers_db, "--powers-db")]
    if len(vals) == 1:
        vals = vals * ch.K
    if len(vals) != ch.K:
        raise InputError(f"--powers: expected 1 or {ch.K} values, got {len(vals)}")
    return ch.replace(P=vals)


def _channel(args) -> StandardChannel:
    if args.channel is None:
        raise InputError("--channel: required")
    return _apply_powers(load_channel(args.channel), args)


def _emit(text: str, out: str | None) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
        return
    try:
        with open(out, "w", newline="\n", encoding="utf-8") as fh:
            fh.write(text)
    except OSError as exc:
        raise InputError(f"--out: cannot write {out}: {exc.strerror}") from None


def _check_writable(out: str | None) -> None:
    if out is None or out == "-":
        return
    parent = Path(out).resolve().parent
    if not parent.is_dir():
        raise InputError(f"--out: directory {parent} does not exist")


def cmd_analyze(args) -> int:
    if args.strategy is None:
        raise InputError("--strategy: required")
    ch = _channel(args)
    strategy = parse_strategy(args.strategy, ch.K)
    report = rate_of(ch, strategy)
    certs = applicable_certificates(ch, strategy, rho2=args.rho2, tol=args.tol)
    doc = {
        "channel": ch.to_dict(),
        "report": report.to_dict(),
        "certificates": [c.to_dict() for c in certs],
    }
    _emit(serialization.dumps(doc), args.out)
    return EXIT_OK


def cmd_recommend(args) -> int:
    ch = _channel(args)
    rec = recommend(ch, args.mode, args.tol)
    _emit(serialization.dumps({"channel": ch.to_dict(), **rec.to_dict()}), args.out)
    return EXIT_OK


def _scan_channel(args) -> StandardChannel:
    if args.channel is not None:
        return _channel(args)
    K = args.K
    if K < 2:
        raise InputError("--K: must be at least 2")
    return _apply_powers(StandardChannel(K, [0.0] * (K - 1), [1.0] * K), args)


def cmd_scan(args) -> int:
    ch = _scan_channel(args)
    axes = [a.strip() for a in args.vary.split(",")]
    if len(axes) != 2:
        raise InputError(f"--vary: expected two selectors, got {args.vary!r}")
    rx = AxisRange.parse(args.range_x or args.range)
    ry = AxisRange.parse(args.range_y or args.range)
    labels = [l for l in args.labels.split(",") if l.strip()]
    if args.deltas:
        labels += [f"T3@delta={d:g}" for d in _floats(args.deltas, "--deltas")]
    spec = ScanSpec(ch, axes[0], axes[1], rx, ry, tuple(labels), args.mode, args.tol)
    if args.trace and args.trace not in spec.region_labels:
        raise InputError(f"--trace: label {args.trace!r} is not among --labels")
    _check_writable(args.out)
    _check_writable(args.trace_out)
    region = scan(spec, workers=args.workers)
    _emit(region.to_csv(), args.out)
    if args.trace:
        lines = ["polyline,x,y"]
        for n, poly in enumerate(boundary_trace(region, args.trace)):
            lines += [f"{n},{x:.9g},{y:.9g}" for x, y in poly]
        _emit("\n".join(lines) + "\n", args.trace_out)
    return EXIT_OK


def cmd_rho_delta(args) -> int:
    if args.b is None:
        raise InputError("--b: required")
    if (args.p3 is None) == (args.p3_db is None):
        raise InputError("--p3: give exactly one of --p3 or --p3-db")
    P3 = args.p3 if args.p3 is not None else db_to_linear(args.p3_db)
    if P3 < 0:
        raise InputError("--p3: power must be nonnegative")
    try:
        deltas = drange(args.delta)
    except ScanError as exc:
        raise InputError(f"--delta: {exc}") from None
    if deltas.min() < 0:
        raise InputError("--delta: gaps must be nonnegative")
    _check_writable(args.out)
    _emit(curve_csv(rho_delta_curve(args.b, P3, deltas)), args.out)
    return EXIT_OK


def cmd_verify(args) -> int:
    _check_writable(args.out)
    results = run_suite(args.suite, args.seed, args.samples, args.trials)
    _emit("".join(r.line() + "\n" for r in results), args.out)
    return EXIT_OK if all(r.passed for r in results) else EXIT_VERIFY


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="manytoone", description="Sum-rate analysis for many-to-one Gaussian channels.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p, channel=True):
        if channel:
            p.add_argument("--channel", help="channel JSON file (standard or raw form)")
            _add_power_flags(p)
        p.add_argument("--out", help="output file (default stdout)")
        p.add_argument("--tol", type=_positive, default=1e-9, help="condition tolerance (default 1e-9)")

    p = sub.add_parser("analyze", help="rate report and certificates for one strategy")
    common(p)
    p.add_argument("--strategy", help="M1, M2:k, M3, MAC:1,2, MI1 or MI:2,3@3,2")
    p.add_argument("--rho2", type=float, help="genie correlation for the M3 gap (default: tightest)")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("recommend", help="best strategy and its strongest certificate")
    common(p)
    p.add_argument("--mode", type=str.upper, choices=["XC", "IC"], default="XC")
    p.set_defaults(func=cmd_recommend)

    p = sub.add_parser("scan", help="classify a 2-D parameter grid into regions")
    common(p)
    p.add_argument("--K", type=int, default=3, help="users when no --channel is given (gains start at 0)")
    p.add_argument("--vary", default="h2,h3", help="two selectors, e.g. h2,h3 or a,P1")
    p.add_argument("--range", default="0:3:0.01", help="min:max:step for both axes")
    p.add_argument("--range-x", help="min:max:step for the first axis")
    p.add_argument("--range-y", help="min:max:step for the second axis")
    p.add_argument("--labels", default="T1,best", help="comma-separated region labels")
    p.add_argument("--deltas", help="gap values in bits; adds one T3@delta label each")
    p.add_argument("--mode", type=str.upper, choices=["XC", "IC"], default="XC")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--trace", help="also trace the boundary of this label")
    p.add_argument("--trace-out", help="file for the traced polylines (default stdout)")
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("rho-delta", help="genie correlation needed for each M3 gap")
    common(p, channel=False)
    p.add_argument("--b", type=float, help="cross gain of the weaker interferer")
    p.add_argument("--p3", type=float, help="its power (linear)")
    p.add_argument("--p3-db", type=float, help="its power in dB")
    p.add_argument("--delta", default="0:2:0.01", help="min:max:step of gaps in bits (inclusive)")
    p.set_defaults(func=cmd_rho_delta)

    p = sub.add_parser("verify", help="run the oracle verification suite")
    common(p, channel=False)
    p.add_argument("--suite", choices=SUITES, default="all")
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--samples", type=int, default=1_000_000, help="Monte-Carlo samples")
    p.add_argument("--trials", type=int, default=200, help="random trials per exact check")
    p.set_defaults(func=cmd_verify)
    return parser


def run(argv=None) -> int:
    """Execute one command; returns the exit status."""
    try:
        args = build_parser().parse_args(argv)
        return args.func(args)
    except (InputError, ChannelError, ScanError, ValueError, IndexError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
