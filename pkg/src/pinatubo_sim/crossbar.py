"""Rows x cols PCM array with per-column bit-lines and multi-row activation."""

from __future__ import annotations

import math
from collections.abc import Iterable, Sequence

import numpy as np

from .device import (
    RESET_PULSE,
    SET_PULSE,
    Cell,
    DeviceParams,
    PhaseState,
    PulseClass,
    PulseSpec,
    classify_pulse,
    sample_resistances,
)
from .errors import EmptyActivation, IndexOutOfRange, InvalidDimensions


def parse_bits(bits: str | Sequence[int], width: int | None = None) -> np.ndarray:
    """Turn ``"1010"`` or ``[1, 0, 1, 0]`` into a uint8 array."""
    if isinstance(bits, str):
        if not bits or set(bits) - {"0", "1"}:
            raise ValueError(f"bit string must contain only 0/1: {bits!r}")
        arr = np.frombuffer(bits.encode(), dtype=np.uint8) - ord("0")
    else:
        arr = np.asarray(bits)
        if arr.ndim != 1 or not np.isin(arr, (0, 1)).all():
            raise ValueError("bit row must be a flat sequence of 0/1")
        arr = arr.astype(np.uint8)
    if width is not None and arr.size != width:
        raise ValueError(f"bit row has length {arr.size}, expected {width}")
    return arr


def format_bits(bits: Iterable[int]) -> str:
    return "".join("1" if b else "0" for b in bits)


class Crossbar:
    """Cell array held as parallel numpy arrays (phase, resistance, counters).

    ``cell(r, c)`` materializes a :class:`Cell` view; mutation goes through
    :meth:`program_row` only. Bit-line wires are ideal (no wire resistance,
    no sneak paths).
    """

    def __init__(
        self,
        rows: int,
        cols: int,
        params: DeviceParams | None = None,
        seed: int | None = None,
        *,
        rng: np.random.Generator | None = None,
        set_pulse: PulseSpec = SET_PULSE,
        reset_pulse: PulseSpec = RESET_PULSE,
    ):
        if int(rows) != rows or int(cols) != cols or rows < 1 or cols < 1:
            raise InvalidDimensions(f"crossbar needs rows, cols >= 1, got {rows}x{cols}")
        self.rows = int(rows)
        self.cols = int(cols)
        self.params = params if params is not None else DeviceParams()
        if rng is None:
            rng = np.random.default_rng(self.params.seed if seed is None else seed)
        self.rng = rng

        if classify_pulse(set_pulse, self.params) is not PulseClass.SET:
            raise ValueError(f"set pulse {set_pulse} does not classify as set")
        if classify_pulse(reset_pulse, self.params) is not PulseClass.RESET:
            raise ValueError(f"reset pulse {reset_pulse} does not classify as reset")
        self.set_pulse = set_pulse
        self.reset_pulse = reset_pulse

        shape = (self.rows, self.cols)
        self._crystalline = np.zeros(shape, dtype=bool)
        self._resistance = sample_resistances(self._crystalline, self.params, self.rng)
        self._set_count = np.zeros(shape, dtype=np.int64)
        self._reset_count = np.zeros(shape, dtype=np.int64)
        self._read_count = np.zeros(shape, dtype=np.int64)

    def __repr__(self):
        return f"Crossbar(rows={self.rows}, cols={self.cols})"

    def _check_row(self, row: int) -> int:
        if not 0 <= row < self.rows:
            raise IndexOutOfRange(f"row {row} outside 0..{self.rows - 1}")
        return int(row)

    def _check_col(self, col: int) -> int:
        if not 0 <= col < self.cols:
            raise IndexOutOfRange(f"column {col} outside 0..{self.cols - 1}")
        return int(col)

    def _check_active(self, active_rows: Iterable[int]) -> list[int]:
        rows = sorted({self._check_row(r) for r in active_rows})
        if not rows:
            raise EmptyActivation("at least one row must be activated")
        return rows

    def cell(self, row: int, col: int) -> Cell:
        r, c = self._check_row(row), self._check_col(col)
        return Cell(
            phase=PhaseState.CRYSTALLINE if self._crystalline[r, c] else PhaseState.AMORPHOUS,
            resistance_ohms=float(self._resistance[r, c]),
            set_count=int(self._set_count[r, c]),
            reset_count=int(self._reset_count[r, c]),
            read_count=int(self._read_count[r, c]),
        )

    @property
    def cells(self) -> list[list[Cell]]:
        return [[self.cell(r, c) for c in range(self.cols)] for r in range(self.rows)]

    @property
    def resistances(self) -> np.ndarray:
        return self._resistance.copy()

    def stored_bits(self, row: int) -> np.ndarray:
        """Phase of each cell in ``row`` as bits (ground truth, not sensed)."""
        return self._crystalline[self._check_row(row)].astype(np.uint8)

    def program_row(self, row: int, bits: str | Sequence[int]) -> "Crossbar":
        """Set every '1' column and reset every '0' column of ``row``.

        One pulse per cell regardless of prior phase; resistances are drawn
        column by column from the crossbar's stream.
        """
        r = self._check_row(row)
        try:
            b = parse_bits(bits, self.cols).astype(bool)
        except ValueError as exc:
            raise InvalidDimensions(str(exc)) from None
        self._crystalline[r] = b
        self._resistance[r] = sample_resistances(b, self.params, self.rng)
        self._set_count[r] += b
        self._reset_count[r] += ~b
        return self

    def record_read(self, active_rows: Iterable[int]) -> None:
        """Count one read pulse on every cell of the activated rows."""
        rows = self._check_active(active_rows)
        self._read_count[rows] += 1

    def _parallel(self, rows: list[int], c: int) -> float:
        if len(rows) == 1:
            return float(self._resistance[rows[0], c])
        # fsum makes the result depend only on the multiset of resistances
        return 1.0 / math.fsum(1.0 / self._resistance[rows, c])

    def bitline_resistance(self, active_rows: Iterable[int], col: int) -> float:
        rows = self._check_active(active_rows)
        return self._parallel(rows, self._check_col(col))

    def bitline_current(
        self, active_rows: Iterable[int], col: int, v_read: float | None = None
    ) -> float:
        v = self.params.read_voltage_v if v_read is None else v_read
        if not v > 0:
            raise ValueError("read voltage must be positive")
        return v / self.bitline_resistance(active_rows, col)

    def bitline_currents(
        self, active_rows: Iterable[int], v_read: float | None = None
    ) -> np.ndarray:
        """Bit-line current of every column for one multi-row activation."""
        v = self.params.read_voltage_v if v_read is None else v_read
        if not v > 0:
            raise ValueError("read voltage must be positive")
        rows = self._check_active(active_rows)
        return np.array([v / self._parallel(rows, c) for c in range(self.cols)])


def new_crossbar(rows: int, cols: int, params: DeviceParams, seed: int) -> Crossbar:
    return Crossbar(rows, cols, params, seed)
