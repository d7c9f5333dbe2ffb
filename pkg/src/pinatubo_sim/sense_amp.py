"""Sense-amplifier logic: reference placement and current classification.

Activating n cells on one bit-line leaves n+1 distinguishable resistance
classes, indexed by how many of the cells are low-resistance. Moving the
sense-amp reference between two adjacent classes turns a plain read into a
k-of-n threshold gate (OR is k=1, AND is k=n); two references bracketing the
middle class of a 2-cell activation give XOR.
"""

from __future__ import annotations

import enum
import math
import re
import warnings
from collections.abc import Sequence
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .device import DeviceParams
from .errors import ArityMismatch, FeasibilityWarning, InfeasibleGate


class OpKind(enum.Enum):
    READ = "read"
    OR = "or"
    AND = "and"
    XOR = "xor"
    NOT = "not"
    THRESHOLD = "thresh"


@dataclass(frozen=True)
class LogicOp:
    kind: OpKind
    k: int | None = None

    def __post_init__(self):
        if self.kind is OpKind.THRESHOLD:
            if self.k is None or self.k < 1:
                raise ValueError("threshold op needs k >= 1")
        elif self.k is not None:
            raise ValueError(f"{self.kind.value} takes no k")

    def __str__(self):
        if self.kind is OpKind.THRESHOLD:
            return f"thresh:{self.k}"
        return self.kind.value

    @classmethod
    def parse(cls, text: str) -> "LogicOp":
        """Parse ``or``, ``and``, ``xor``, ``not``, ``read`` or ``thresh:K``."""
        t = text.strip().lower()
        m = re.fullmatch(r"(?:thresh|threshold)[:=](\d+)", t)
        if m:
            return threshold(int(m.group(1)))
        try:
            kind = OpKind(t)
        except ValueError:
            raise ValueError(f"unknown logic op {text!r}") from None
        if kind is OpKind.THRESHOLD:
            raise ValueError("threshold op needs k, e.g. thresh:2")
        return cls(kind)

    def check_arity(self, n: int) -> None:
        kind = self.kind
        if kind in (OpKind.READ, OpKind.NOT) and n != 1:
            raise ArityMismatch(f"{self} takes exactly 1 input, got {n}")
        if kind is OpKind.XOR and n != 2:
            raise ArityMismatch(f"xor takes exactly 2 inputs, got {n}")
        if kind is OpKind.THRESHOLD and not 1 <= self.k <= n:
            raise ArityMismatch(f"{self} needs 1 <= k <= n, got n={n}")
        if n < 1:
            raise ArityMismatch("need at least one input")

    def min_ones(self, n: int) -> int:
        """k such that the op outputs 1 iff at least k inputs are 1."""
        if self.kind in (OpKind.READ, OpKind.OR):
            return 1
        if self.kind is OpKind.AND:
            return n
        if self.kind is OpKind.THRESHOLD:
            return self.k
        raise ArityMismatch(f"{self} is not a threshold gate")

    def evaluate(self, bits: Sequence[int]) -> int:
        """Boolean value of the op on one input combination."""
        self.check_arity(len(bits))
        ones = sum(1 for b in bits if b)
        if self.kind is OpKind.XOR:
            return ones % 2
        if self.kind is OpKind.NOT:
            return 1 - ones
        return int(ones >= self.min_ones(len(bits)))


READ = LogicOp(OpKind.READ)
OR = LogicOp(OpKind.OR)
AND = LogicOp(OpKind.AND)
XOR = LogicOp(OpKind.XOR)
NOT = LogicOp(OpKind.NOT)


def threshold(k: int) -> LogicOp:
    return LogicOp(OpKind.THRESHOLD, k)


class ClassBoundaries(NamedTuple):
    r_one_worst: float  # highest-resistance member of the output-'1' class
    r_zero_worst: float  # lowest-resistance member of the output-'0' class

    @property
    def margin_ratio(self) -> float:
        return self.r_zero_worst / self.r_one_worst


class XorClasses(NamedTuple):
    r_both_low: float
    r_mixed: float
    r_both_high: float


@dataclass(frozen=True)
class SenseAmpConfig:
    """One calibrated sense amplifier.

    For XOR, ``ref_primary_ohms`` is the low-resistance-side reference and
    ``ref_secondary_ohms`` the high-resistance-side one; the output is 1 only
    for currents strictly between the two reference currents.
    """

    op: LogicOp
    n_inputs: int
    ref_primary_ohms: float
    ref_secondary_ohms: float | None = None
    invert_output: bool = False

    def __post_init__(self):
        if not self.ref_primary_ohms > 0:
            raise ValueError("reference resistance must be positive")
        is_xor = self.op.kind is OpKind.XOR
        if is_xor != (self.ref_secondary_ohms is not None):
            raise ValueError("a secondary reference is required for xor and only for xor")
        if is_xor and not self.ref_secondary_ohms > self.ref_primary_ohms:
            raise ValueError("xor low-side reference must be below the high-side one")
        if self.invert_output != (self.op.kind is OpKind.NOT):
            raise ValueError("invert_output is set for not and only for not")


def parallel_resistance(n_low: int, n: int, params: DeviceParams) -> float:
    """Bit-line resistance with ``n_low`` crystalline and ``n - n_low`` amorphous cells."""
    if not 0 <= n_low <= n or n < 1:
        raise ValueError(f"invalid class ({n_low} low of {n})")
    return 1.0 / (n_low / params.r_low_ohms + (n - n_low) / params.r_high_ohms)


def class_boundaries(op: LogicOp, n: int, params: DeviceParams) -> ClassBoundaries:
    if op.kind is OpKind.XOR:
        raise ArityMismatch("xor has two windows; use xor_classes")
    op.check_arity(n)
    k = 1 if op.kind is OpKind.NOT else op.min_ones(n)
    b = ClassBoundaries(
        parallel_resistance(k, n, params), parallel_resistance(k - 1, n, params)
    )
    if not b.r_one_worst < b.r_zero_worst:
        raise InfeasibleGate(
            f"{op} on {n} inputs: '1' class reaches {b.r_one_worst:.6g} ohm, "
            f"'0' class reaches {b.r_zero_worst:.6g} ohm"
        )
    return b


def xor_classes(params: DeviceParams) -> XorClasses:
    c = XorClasses(
        parallel_resistance(2, 2, params),
        parallel_resistance(1, 2, params),
        parallel_resistance(0, 2, params),
    )
    if not c.r_both_low < c.r_mixed < c.r_both_high:
        raise InfeasibleGate("xor classes are not separable")
    return c


def margin_ratio(op: LogicOp, n: int, params: DeviceParams) -> float:
    """Worst-case '0'-class over '1'-class resistance (min over both windows for xor)."""
    if op.kind is OpKind.XOR:
        op.check_arity(n)
        c = xor_classes(params)
        return min(c.r_mixed / c.r_both_low, c.r_both_high / c.r_mixed)
    return class_boundaries(op, n, params).margin_ratio


def required_margin(sigma_decades: float) -> float:
    """Margin needed to keep about 3 sigma of log-spread on each side of the reference."""
    return 10.0 ** (6.0 * sigma_decades)


def is_marginal(op: LogicOp, n: int, params: DeviceParams) -> bool:
    return margin_ratio(op, n, params) < required_margin(params.sigma_decades)


def _geomean(a: float, b: float) -> float:
    return math.sqrt(a) * math.sqrt(b)


def calibrate(op: LogicOp, n: int, params: DeviceParams) -> SenseAmpConfig:
    """Place the reference(s) at the geometric mean of the bounding classes.

    Emits :class:`FeasibilityWarning` when the margin is too narrow for the
    configured spread.
    """
    if op.kind is OpKind.XOR:
        op.check_arity(n)
        c = xor_classes(params)
        cfg = SenseAmpConfig(
            op,
            n,
            ref_primary_ohms=_geomean(c.r_both_low, c.r_mixed),
            ref_secondary_ohms=_geomean(c.r_mixed, c.r_both_high),
        )
    else:
        b = class_boundaries(op, n, params)
        cfg = SenseAmpConfig(
            op,
            n,
            ref_primary_ohms=_geomean(b.r_one_worst, b.r_zero_worst),
            invert_output=op.kind is OpKind.NOT,
        )
    if is_marginal(op, n, params):
        warnings.warn(
            f"{op} on {n} inputs: margin ratio {margin_ratio(op, n, params):.4g} is below "
            f"{required_margin(params.sigma_decades):.4g} needed at sigma="
            f"{params.sigma_decades} decades",
            FeasibilityWarning,
            stacklevel=2,
        )
    return cfg


def fixed_reference(op: LogicOp, n: int, ref_ohms: float) -> SenseAmpConfig:
    """Sense-amp config with a hand-picked reference instead of a calibrated one."""
    if op.kind is OpKind.XOR:
        raise ValueError("xor needs two references; a single override is not supported")
    op.check_arity(n)
    return SenseAmpConfig(op, n, ref_ohms, invert_output=op.kind is OpKind.NOT)


def sense(i_bitline: float, cfg: SenseAmpConfig, v_read: float) -> int:
    if i_bitline < 0:
        raise ValueError("bit-line current must be non-negative")
    if not v_read > 0:
        raise ValueError("read voltage must be positive")
    if cfg.op.kind is OpKind.XOR:
        return int(v_read / cfg.ref_secondary_ohms < i_bitline < v_read / cfg.ref_primary_ohms)
    raw = i_bitline > v_read / cfg.ref_primary_ohms
    return int(raw ^ cfg.invert_output)


def sense_many(currents, cfg: SenseAmpConfig, v_read: float):
    """Column-parallel ``sense``; returns a uint8 array with the same comparisons."""
    i = np.asarray(currents, dtype=float)
    if (i < 0).any():
        raise ValueError("bit-line current must be non-negative")
    if not v_read > 0:
        raise ValueError("read voltage must be positive")
    if cfg.op.kind is OpKind.XOR:
        out = (v_read / cfg.ref_secondary_ohms < i) & (i < v_read / cfg.ref_primary_ohms)
    else:
        out = (i > v_read / cfg.ref_primary_ohms) ^ cfg.invert_output
    return out.astype(np.uint8)
