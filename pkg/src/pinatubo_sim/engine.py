"""Bulk row-level bitwise operations and the line-oriented operation script.

Script grammar (one command per line, ``#`` starts a comment, mnemonics are
case-insensitive, rows are written ``r<index>``)::

    PROG   <row> <bits>
    OR     <dest> <src> <src> [<src> ...]
    AND    <dest> <src> <src> [<src> ...]
    XOR    <dest> <src> <src>
    NOT    <dest> <src>
    THRESH <dest> <k> <src> [<src> ...]
    READ   <row>
"""

from __future__ import annotations

import re
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field

import numpy as np

from .crossbar import Crossbar, format_bits
from .errors import IndexOutOfRange, OperandConflict, ParseError
from .sense_amp import AND, NOT, OR, READ, XOR, LogicOp, calibrate, sense_many, threshold

_ROW = re.compile(r"r(\d+)", re.IGNORECASE)
_BITS = re.compile(r"[01]+")
_MNEMONICS = ("PROG", "OR", "AND", "XOR", "NOT", "THRESH", "READ")


@dataclass
class OpStats:
    set_pulses: int = 0
    reset_pulses: int = 0
    read_activations: int = 0
    rows_activated_total: int = 0


@dataclass(frozen=True)
class Command:
    """One parsed script line. ``row`` is the PROG/READ target or the bulk-op destination."""

    mnemonic: str
    row: int
    srcs: tuple[int, ...] = ()
    k: int | None = None
    bits: str | None = None
    line: int = 0

    def __str__(self):
        parts = [self.mnemonic, f"r{self.row}"]
        if self.mnemonic == "PROG":
            parts.append(self.bits)
        if self.k is not None:
            parts.append(str(self.k))
        parts.extend(f"r{s}" for s in self.srcs)
        return " ".join(parts)

    @property
    def logic_op(self) -> LogicOp | None:
        if self.mnemonic == "THRESH":
            return threshold(self.k)
        return {"OR": OR, "AND": AND, "XOR": XOR, "NOT": NOT}.get(self.mnemonic)


@dataclass(frozen=True)
class TraceEntry:
    step: int
    command: str
    result_bits: str | None


def _row(token: str, lineno: int, rows: int | None) -> int:
    m = _ROW.fullmatch(token)
    if not m:
        raise ParseError(lineno, f"expected a row like r0, got {token!r}")
    idx = int(m.group(1))
    if rows is not None and idx >= rows:
        raise ParseError(lineno, f"row r{idx} out of range (array has {rows} rows)")
    return idx


def parse_line(text: str, lineno: int, rows: int | None = None, cols: int | None = None):
    """Parse one script line; returns None for blank and comment-only lines."""
    tokens = text.split("#", 1)[0].split()
    if not tokens:
        return None
    mnem, args = tokens[0].upper(), tokens[1:]
    if mnem not in _MNEMONICS:
        raise ParseError(lineno, f"unknown command {tokens[0]!r}")

    def need(cond: bool, reason: str):
        if not cond:
            raise ParseError(lineno, f"{mnem}: {reason}")

    if mnem == "PROG":
        need(len(args) == 2, "expected <row> <bits>")
        row = _row(args[0], lineno, rows)
        need(_BITS.fullmatch(args[1]) is not None, f"bits must be 0/1, got {args[1]!r}")
        need(cols is None or len(args[1]) == cols, f"bits have length {len(args[1])}, array has {cols} columns")
        return Command(mnem, row, bits=args[1], line=lineno)
    if mnem == "READ":
        need(len(args) == 1, "expected <row>")
        return Command(mnem, _row(args[0], lineno, rows), line=lineno)

    k = None
    if mnem == "THRESH":
        need(len(args) >= 3, "expected <dest> <k> <src>...")
        need(args[1].isdigit(), f"k must be a positive integer, got {args[1]!r}")
        k = int(args[1])
        del args[1]
    need(len(args) >= 2, "expected <dest> <src>...")
    dest = _row(args[0], lineno, rows)
    srcs = tuple(_row(a, lineno, rows) for a in args[1:])
    arity = {"OR": (2, None), "AND": (2, None), "XOR": (2, 2), "NOT": (1, 1), "THRESH": (1, None)}
    lo, hi = arity[mnem]
    need(len(srcs) >= lo and (hi is None or len(srcs) <= hi),
         f"takes {lo if lo == hi else f'at least {lo}'} source rows, got {len(srcs)}")
    need(dest not in srcs, f"destination r{dest} is also a source")
    need(len(set(srcs)) == len(srcs), "source rows must be distinct")
    if k is not None:
        need(1 <= k <= len(srcs), f"k={k} must be between 1 and {len(srcs)}")
    return Command(mnem, dest, srcs=srcs, k=k, line=lineno)


def parse_script(text: str, rows: int | None = None, cols: int | None = None) -> list[Command]:
    """Parse a whole script, validating row indices and bit widths when dimensions are given."""
    out = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        cmd = parse_line(line, lineno, rows, cols)
        if cmd is not None:
            out.append(cmd)
    return out


def bulk_op(
    cb: Crossbar,
    op: LogicOp,
    src_rows: Iterable[int],
    dest_row: int,
    stats: OpStats | None = None,
) -> np.ndarray:
    """Activate ``src_rows`` together, sense every column, write the result to ``dest_row``."""
    srcs = list(src_rows)
    if len(set(srcs)) != len(srcs):
        raise OperandConflict("source rows must be distinct")
    if dest_row in srcs:
        raise OperandConflict(f"destination row {dest_row} is also a source")
    if not 0 <= dest_row < cb.rows:
        raise IndexOutOfRange(f"row {dest_row} outside 0..{cb.rows - 1}")
    cfg = calibrate(op, len(srcs), cb.params)
    v = cb.params.read_voltage_v
    # all columns are sensed before any write-back
    currents = cb.bitline_currents(srcs, v)
    cb.record_read(srcs)
    result = sense_many(currents, cfg, v)
    cb.program_row(dest_row, result)
    if stats is not None:
        stats.read_activations += 1
        stats.rows_activated_total += len(srcs)
        ones = int(result.sum())
        stats.set_pulses += ones
        stats.reset_pulses += cb.cols - ones
    return result


def read_row(cb: Crossbar, row: int, stats: OpStats | None = None) -> np.ndarray:
    cfg = calibrate(READ, 1, cb.params)
    v = cb.params.read_voltage_v
    currents = cb.bitline_currents([row], v)
    cb.record_read([row])
    if stats is not None:
        stats.read_activations += 1
        stats.rows_activated_total += 1
    return sense_many(currents, cfg, v)


def run_script(
    cb: Crossbar, script: str | Sequence[Command]
) -> tuple[list[TraceEntry], OpStats]:
    if isinstance(script, str):
        script = parse_script(script, cb.rows, cb.cols)
    stats = OpStats()
    trace = []
    for step, cmd in enumerate(script):
        result = None
        if cmd.mnemonic == "PROG":
            cb.program_row(cmd.row, cmd.bits)
            ones = cmd.bits.count("1")
            stats.set_pulses += ones
            stats.reset_pulses += len(cmd.bits) - ones
        elif cmd.mnemonic == "READ":
            result = format_bits(read_row(cb, cmd.row, stats))
        else:
            result = format_bits(bulk_op(cb, cmd.logic_op, cmd.srcs, cmd.row, stats))
        trace.append(TraceEntry(step, str(cmd), result))
    return trace, stats
