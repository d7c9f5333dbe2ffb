"""Command-line front end.

Exit codes: 0 success, 1 usage/parse/IO error, 2 infeasible gate.
"""

from __future__ import annotations

import argparse
import math
import sys
import warnings
from dataclasses import asdict
from pathlib import Path

from . import config as config_mod
from .analysis import margin_sweep, region_histogram, truth_table
from .crossbar import Crossbar
from .device import DeviceParams
from .engine import run_script
from .errors import FeasibilityWarning, InfeasibleGate, ParseError, PinatuboError
from .report import margins_csv, regions_csv, trace_csv, truthtable_csv, write_atomic
from .sense_amp import (
    OpKind,
    LogicOp,
    calibrate,
    class_boundaries,
    is_marginal,
    margin_ratio,
    required_margin,
    xor_classes,
)

EXIT_OK, EXIT_USAGE, EXIT_INFEASIBLE = 0, 1, 2

_UNITS = {
    "r_low_ohms": "ohm",
    "r_high_ohms": "ohm",
    "sigma_decades": "decades of log10(R)",
    "read_voltage_v": "V",
    "read_v_max": "V",
    "set_v_min": "V",
    "set_v_max": "V",
    "set_min_total_ns": "ns (width + fall)",
    "reset_v_min": "V",
    "reset_max_width_ns": "ns",
    "seed": "",
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _defaults_epilog() -> str:
    cfg = config_mod.Config()
    lines = ["config defaults (JSON keys; override with --config or $PINATUBO_SIM_CONFIG):",
             f"  rows = {cfg.rows}", f"  cols = {cfg.cols}"]
    for key, value in asdict(DeviceParams()).items():
        unit = _UNITS.get(key, "")
        lines.append(f"  {key} = {value:g} {unit}".rstrip())
    for key in ("set_pulse", "reset_pulse"):
        p = getattr(cfg, key)
        lines.append(
            f"  {key} = {p.amplitude_v:g} V, rise {p.rise_ns:g} ns, "
            f"width {p.width_ns:g} ns, fall {p.fall_ns:g} ns"
        )
    return "\n".join(lines)


def parse_range(text: str, kind=float) -> list:
    """``start:stop:step`` (endpoints inclusive within half a step), ``a,b,c`` or a single value."""
    text = text.strip()
    try:
        if ":" in text:
            parts = text.split(":")
            if len(parts) != 3:
                raise UsageError(f"range must be start:stop:step, got {text!r}")
            start, stop, step = (kind(p) for p in parts)
            if not step > 0 or stop < start:
                raise UsageError(f"range needs step > 0 and stop >= start, got {text!r}")
            # nearest grid point to stop, ties toward fewer points
            count = int(math.ceil((stop - start) / step - 0.5)) + 1
            values = [start + i * step for i in range(count)]
            return [round(v, 12) for v in values] if kind is float else values
        return [kind(p) for p in text.split(",")]
    except ValueError:
        raise UsageError(f"cannot parse {text!r} as {kind.__name__} values") from None


def _op(text: str) -> LogicOp:
    try:
        return LogicOp.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return value


def build_parser() -> argparse.ArgumentParser:
    fmt = argparse.RawDescriptionHelpFormatter
    parser = _Parser(
        prog="pinatubo-sim",
        description="Multi-row activation PCM logic simulator.",
        epilog=_defaults_epilog(),
        formatter_class=fmt,
    )
    parser.add_argument("--config", help="JSON config path (default: $PINATUBO_SIM_CONFIG, else built-in defaults)")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p, *, sweep=False):
        p.add_argument("--config", default=argparse.SUPPRESS, help="JSON config path")
        p.add_argument("--op", type=_op, required=True, help="or | and | xor | not | read | thresh:K")
        if sweep:
            p.add_argument("--inputs", default=None,
                           help="n values: N, a,b,c or start:stop:step (default: 1 for read/not, else 2)")
            p.add_argument("--sigma", default=None,
                           help="sigma values in decades: S, a,b,c or start:stop:step (default: config sigma)")
        else:
            p.add_argument("--inputs", type=_positive_int, default=None,
                           help="number of activated rows (default: 1 for read/not, else 2)")
            p.add_argument("--sigma", type=float, default=None,
                           help="override sigma_decades, std. dev. of log10(R) in decades (config default 0.1)")
        p.add_argument("--seed", type=int, default=None, help="override the config seed (config default 42)")

    def analysis(p):
        p.add_argument("--trials", type=_positive_int, default=100,
                       help="Monte Carlo trials per input class (default: 100)")
        p.add_argument("--out", help="output CSV path (default: stdout)")

    p = sub.add_parser("calibrate", help="print reference resistance(s), class boundaries and margin",
                       formatter_class=fmt, epilog=_defaults_epilog())
    common(p)

    p = sub.add_parser("truthtable", help="per-class current statistics and SA error counts (CSV)",
                       formatter_class=fmt, epilog=_defaults_epilog())
    common(p)
    analysis(p)
    p.add_argument("--ref", type=float, default=None,
                   help="fixed reference resistance in ohm instead of the calibrated one")
    p.add_argument("--full", action="store_true",
                   help="enumerate all 2^n combinations instead of one per number of '1's")

    p = sub.add_parser("regions", help="histogram of log10(current) per input class (CSV)",
                       formatter_class=fmt, epilog=_defaults_epilog())
    common(p)
    analysis(p)
    p.add_argument("--ref", type=float, default=None, help="reference resistance in ohm to report")
    p.add_argument("--bins-per-decade", type=_positive_int, default=10,
                   help="histogram bins per decade of current (default: 10)")

    p = sub.add_parser("margins", help="error rate and margin ratio over n and sigma (CSV)",
                       formatter_class=fmt, epilog=_defaults_epilog())
    common(p, sweep=True)
    analysis(p)

    p = sub.add_parser("run", help="execute an operation script and write its trace (CSV)",
                       formatter_class=fmt, epilog=_defaults_epilog())
    p.add_argument("script", help="script file path")
    p.add_argument("--config", default=argparse.SUPPRESS, help="JSON config path")
    p.add_argument("--sigma", type=float, default=None, help="override sigma_decades")
    p.add_argument("--seed", type=int, default=None, help="override the config seed")
    p.add_argument("--out", help="trace CSV path (default: stdout)")

    p = sub.add_parser("config", help="print the effective config as JSON")
    p.add_argument("--config", default=argparse.SUPPRESS, help="JSON config path")
    p.add_argument("--out", help="output path (default: stdout)")
    return parser


def _emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        write_atomic(out, text)


def _info(args, msg: str) -> None:
    # summaries go to stderr when the CSV itself is on stdout
    print(msg, file=sys.stdout if args.out else sys.stderr)


def _default_inputs(op: LogicOp) -> int:
    return 1 if op.kind in (OpKind.READ, OpKind.NOT) else 2


def _inputs(args) -> int:
    return args.inputs if args.inputs is not None else _default_inputs(args.op)


def cmd_calibrate(args, cfg: config_mod.Config) -> int:
    params = cfg.device
    op, n = args.op, _inputs(args)
    print(f"op: {op}  inputs: {n}  sigma: {params.sigma_decades:g} decades")
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", FeasibilityWarning)
        sa = calibrate(op, n, params)
    if op.kind is OpKind.XOR:
        c = xor_classes(params)
        print(f"class resistances: both-low {c.r_both_low:.6g} ohm, mixed {c.r_mixed:.6g} ohm, "
              f"both-high {c.r_both_high:.6g} ohm")
        print(f"reference (low side): {sa.ref_primary_ohms:.6g} ohm")
        print(f"reference (high side): {sa.ref_secondary_ohms:.6g} ohm")
    else:
        b = class_boundaries(op, n, params)
        print(f"r_one_worst: {b.r_one_worst:.6g} ohm")
        print(f"r_zero_worst: {b.r_zero_worst:.6g} ohm")
        print(f"reference: {sa.ref_primary_ohms:.6g} ohm"
              + ("  (output inverted)" if sa.invert_output else ""))
    margin = margin_ratio(op, n, params)
    print(f"margin ratio: {margin:.6g}")
    if is_marginal(op, n, params):
        print(f"warning: margin ratio {margin:.4g} is below {required_margin(params.sigma_decades):.4g} "
              f"(about 3 sigma each side at sigma={params.sigma_decades:g}); expect sensing errors",
              file=sys.stderr)
    return EXIT_OK


def cmd_truthtable(args, cfg: config_mod.Config) -> int:
    n = _inputs(args)
    table = truth_table(args.op, n, cfg.device, ref_override=args.ref,
                        trials=args.trials, full=args.full)
    _emit(truthtable_csv(table), args.out)
    total = sum(c.errors for c in table)
    _info(args, f"{args.op} n={n}: {total} errors over {len(table)} classes x {args.trials} trials")
    return EXIT_OK


def cmd_regions(args, cfg: config_mod.Config) -> int:
    n = _inputs(args)
    hist = region_histogram(args.op, n, cfg.device, trials=args.trials,
                            bins_per_decade=args.bins_per_decade, ref_override=args.ref)
    _emit(regions_csv(hist), args.out)
    v = cfg.device.read_voltage_v
    ref = hist.reference
    refs = [ref.ref_primary_ohms] + ([ref.ref_secondary_ohms] if ref.ref_secondary_ohms else [])
    ref_txt = ", ".join(f"{r:.6g} ohm (log10 I = {math.log10(v / r):.3f})" for r in refs)
    _info(args, f"{args.op} n={n}: class gap {hist.class_gap_decades():.2f} decades; reference {ref_txt}")
    return EXIT_OK


def cmd_margins(args, cfg: config_mod.Config) -> int:
    n_values = parse_range(args.inputs, int) if args.inputs else [_default_inputs(args.op)]
    sigmas = parse_range(args.sigma, float) if args.sigma else [cfg.device.sigma_decades]
    if any(s < 0 for s in sigmas):
        raise UsageError("sigma values must be >= 0")
    rows = margin_sweep(args.op, n_values, sigmas, trials=args.trials, params=cfg.device)
    _emit(margins_csv(rows), args.out)
    for r in rows:
        if r.error:
            _info(args, f"n={r.n} sigma={r.sigma:g}: infeasible: {r.error}")
    _info(args, f"{args.op}: {len(rows)} sweep rows")
    return EXIT_OK


def cmd_run(args, cfg: config_mod.Config) -> int:
    try:
        text = Path(args.script).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read script {args.script}: {exc.strerror}") from None
    cb = Crossbar(cfg.rows, cfg.cols, cfg.device, set_pulse=cfg.set_pulse, reset_pulse=cfg.reset_pulse)
    try:
        trace, stats = run_script(cb, text)
    except ParseError as exc:
        raise UsageError(f"{args.script}: {exc}") from None
    _emit(trace_csv(trace), args.out)
    _info(args, f"set pulses: {stats.set_pulses}  reset pulses: {stats.reset_pulses}  "
                f"read activations: {stats.read_activations}  rows activated: {stats.rows_activated_total}")
    return EXIT_OK


def cmd_config(args, cfg: config_mod.Config) -> int:
    _emit(config_mod.dumps(cfg), args.out)
    return EXIT_OK


COMMANDS = {
    "calibrate": cmd_calibrate,
    "truthtable": cmd_truthtable,
    "regions": cmd_regions,
    "margins": cmd_margins,
    "run": cmd_run,
    "config": cmd_config,
}


def _show_warning(message, category, filename, lineno, file=None, line=None):
    print(f"warning: {message}", file=sys.stderr)


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    warnings.showwarning = _show_warning
    try:
        cfg = config_mod.load(args.config)
        cfg = cfg.with_overrides(sigma=getattr(args, "sigma", None) if args.command != "margins" else None,
                                 seed=getattr(args, "seed", None))
        return COMMANDS[args.command](args, cfg)
    except InfeasibleGate as exc:
        print(f"error: infeasible gate: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (PinatuboError, UsageError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"error: {exc.filename or ''}: {exc.strerror or exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
