"""CSV rendering and atomic file output."""

from __future__ import annotations

import csv
import io
import math
import os
import tempfile
from collections.abc import Iterable, Sequence

from .analysis import ClassStats, RegionHistogram, SweepRow
from .engine import TraceEntry

TRUTHTABLE_HEADER = ("combo", "trials", "i_min_a", "i_mean_a", "i_max_a", "log10_std", "out0", "out1", "errors")
REGIONS_HEADER = ("class", "bin_low_log10a", "bin_high_log10a", "count")
MARGINS_HEADER = ("op", "n", "sigma", "margin_ratio", "error_rate")
TRACE_HEADER = ("step", "command", "result_bits")


def fmt(x: float) -> str:
    """17 significant digits in exponent form; round-trips through float()."""
    if math.isnan(x):
        return "nan"
    return f"{x:.16e}"


def _render(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def truthtable_csv(table: list[ClassStats]) -> str:
    return _render(
        TRUTHTABLE_HEADER,
        (
            (c.label, c.trials, fmt(c.current_min), fmt(c.current_mean), fmt(c.current_max),
             fmt(c.log10_std), c.out0, c.out1, c.errors)
            for c in table
        ),
    )


def regions_csv(hist: RegionHistogram) -> str:
    rows = []
    for cls in hist.classes:
        for index, count in cls.bins:
            lo, hi = hist.bin_edges(index)
            rows.append((cls.label, fmt(lo), fmt(hi), count))
    return _render(REGIONS_HEADER, rows)


def margins_csv(rows: list[SweepRow]) -> str:
    return _render(
        MARGINS_HEADER,
        ((str(r.op), r.n, fmt(r.sigma), fmt(r.margin_ratio), fmt(r.error_rate)) for r in rows),
    )


def trace_csv(trace: list[TraceEntry]) -> str:
    return _render(
        TRACE_HEADER,
        ((e.step, e.command, "" if e.result_bits is None else e.result_bits) for e in trace),
    )


def write_atomic(path: str | os.PathLike, text: str) -> None:
    """Write via a temp file in the target directory, then rename over ``path``."""
    path = os.fspath(path)
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=".csv")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
