"""Monte Carlo reproduction of the multi-row OR/AND measurements.

Each trial builds a fresh array holding one input combination per column,
programs it, activates all rows at once and senses every column. Trial
streams are spawned from one ``SeedSequence`` so results are reproducible and
independent of evaluation order.
"""

from __future__ import annotations

import itertools
import math
import warnings
from dataclasses import dataclass, replace

import numpy as np

from .crossbar import Crossbar, format_bits
from .device import DeviceParams
from .errors import FeasibilityWarning, InfeasibleGate
from .sense_amp import (
    LogicOp,
    SenseAmpConfig,
    calibrate,
    fixed_reference,
    margin_ratio,
    required_margin,
    sense_many,
)


@dataclass(frozen=True)
class ClassStats:
    combination: tuple[int, ...]
    expected: int
    trials: int
    current_min: float
    current_mean: float
    current_max: float
    log10_std: float
    out0: int
    out1: int
    errors: int

    @property
    def label(self) -> str:
        return format_bits(self.combination)


def combinations(n: int, full: bool = False) -> list[tuple[int, ...]]:
    """Input combinations, most '1's first.

    By default one representative per multiset (j ones then n-j zeros),
    since the bit-line only sees how many cells are low-resistance.
    """
    if full:
        return list(itertools.product((1, 0), repeat=n))
    return [(1,) * j + (0,) * (n - j) for j in range(n, -1, -1)]


def simulate_currents(
    n: int,
    combos: list[tuple[int, ...]],
    params: DeviceParams,
    trials: int,
    seed: int,
) -> np.ndarray:
    """Bit-line currents, shape (trials, len(combos))."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    streams = np.random.SeedSequence(seed).spawn(trials)
    columns = np.array(combos, dtype=np.uint8).T  # row r holds bit r of every combo
    out = np.empty((trials, len(combos)))
    for t, ss in enumerate(streams):
        cb = Crossbar(n, len(combos), params, rng=np.random.default_rng(ss))
        for r in range(n):
            cb.program_row(r, columns[r])
        out[t] = cb.bitline_currents(range(n))
    return out


def _sense_config(
    op: LogicOp, n: int, params: DeviceParams, ref_override: float | None
) -> SenseAmpConfig:
    if ref_override is not None:
        return fixed_reference(op, n, ref_override)
    return calibrate(op, n, params)


def truth_table(
    op: LogicOp,
    n: int,
    params: DeviceParams,
    ref_override: float | None = None,
    trials: int = 100,
    seed: int | None = None,
    full: bool = False,
) -> list[ClassStats]:
    op.check_arity(n)
    cfg = _sense_config(op, n, params, ref_override)
    seed = params.seed if seed is None else seed
    combos = combinations(n, full)
    currents = simulate_currents(n, combos, params, trials, seed)
    v = params.read_voltage_v
    outputs = sense_many(currents.ravel(), cfg, v).reshape(currents.shape)

    table = []
    for j, combo in enumerate(combos):
        i = currents[:, j]
        ones = int(outputs[:, j].sum())
        expected = op.evaluate(combo)
        table.append(
            ClassStats(
                combination=combo,
                expected=expected,
                trials=trials,
                current_min=float(i.min()),
                current_mean=float(i.mean()),
                current_max=float(i.max()),
                log10_std=float(np.log10(i).std()),
                out0=trials - ones,
                out1=ones,
                errors=ones if expected == 0 else trials - ones,
            )
        )
    return table


@dataclass(frozen=True)
class ClassRegion:
    combination: tuple[int, ...]
    expected: int
    bins: list[tuple[int, int]]  # (bin index, count), bin i spans [i, i+1) / bins_per_decade

    @property
    def label(self) -> str:
        return format_bits(self.combination)

    @property
    def first_bin(self) -> int:
        return self.bins[0][0]

    @property
    def last_bin(self) -> int:
        return self.bins[-1][0]


@dataclass(frozen=True)
class RegionHistogram:
    op: LogicOp
    n: int
    bins_per_decade: int
    reference: SenseAmpConfig
    classes: list[ClassRegion]

    def bin_edges(self, index: int) -> tuple[float, float]:
        return index / self.bins_per_decade, (index + 1) / self.bins_per_decade

    def class_gap_decades(self) -> float:
        """Empty space, in decades of current, between the closest occupied bins
        of any '1'-class region and any '0'-class region (negative if they overlap)."""
        ones = [c for c in self.classes if c.expected == 1]
        zeros = [c for c in self.classes if c.expected == 0]
        gap = math.inf
        for a in ones:
            for b in zeros:
                sep = max(a.first_bin - b.last_bin - 1, b.first_bin - a.last_bin - 1)
                gap = min(gap, sep / self.bins_per_decade)
        return gap


def region_histogram(
    op: LogicOp,
    n: int,
    params: DeviceParams,
    trials: int = 100,
    bins_per_decade: int = 10,
    seed: int | None = None,
    ref_override: float | None = None,
) -> RegionHistogram:
    """Histogram of log10(bit-line current) per input class."""
    if bins_per_decade < 1:
        raise ValueError("bins_per_decade must be >= 1")
    op.check_arity(n)
    cfg = _sense_config(op, n, params, ref_override)
    seed = params.seed if seed is None else seed
    combos = combinations(n)
    currents = simulate_currents(n, combos, params, trials, seed)
    idx = np.floor(np.log10(currents) * bins_per_decade).astype(np.int64)
    classes = []
    for j, combo in enumerate(combos):
        uniq, counts = np.unique(idx[:, j], return_counts=True)
        classes.append(
            ClassRegion(
                combo,
                op.evaluate(combo),
                [(int(u), int(c)) for u, c in zip(uniq, counts)],
            )
        )
    return RegionHistogram(op, n, bins_per_decade, cfg, classes)


@dataclass(frozen=True)
class SweepRow:
    op: LogicOp
    n: int
    sigma: float
    margin_ratio: float
    error_rate: float
    marginal: bool = False
    error: str | None = None


def margin_sweep(
    op: LogicOp,
    n_values: list[int],
    sigma_values: list[float],
    trials: int = 100,
    seed: int | None = None,
    params: DeviceParams | None = None,
) -> list[SweepRow]:
    """Error rate and analytic margin for every (n, sigma) with calibrated references.

    The error rate weights each multiset class equally. Every row reuses the
    same seed (common random numbers), so rows differ only by n and sigma.
    """
    if not n_values or not sigma_values:
        raise ValueError("n_values and sigma_values must be non-empty")
    base = params if params is not None else DeviceParams()
    seed = base.seed if seed is None else seed
    rows = []
    for n in n_values:
        op.check_arity(n)
        for sigma in sigma_values:
            p = replace(base, sigma_decades=sigma)
            try:
                with warnings.catch_warnings():
                    warnings.simplefilter("ignore", FeasibilityWarning)
                    table = truth_table(op, n, p, trials=trials, seed=seed)
                    margin = margin_ratio(op, n, p)
            except InfeasibleGate as exc:
                rows.append(SweepRow(op, n, sigma, math.nan, math.nan, True, str(exc)))
                continue
            errors = sum(c.errors for c in table)
            rows.append(
                SweepRow(
                    op,
                    n,
                    sigma,
                    margin,
                    errors / (trials * len(table)),
                    marginal=margin < required_margin(sigma),
                )
            )
    return rows
