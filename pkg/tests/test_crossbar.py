import random

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracle import parallel_exact
from pinatubo_sim.crossbar import Crossbar, new_crossbar
from pinatubo_sim.device import (
    RESET_PULSE,
    SET_PULSE,
    Cell,
    DeviceParams,
    PhaseState,
    apply_pulse,
    cell_current,
)
from pinatubo_sim.errors import EmptyActivation, IndexOutOfRange, InvalidDimensions

P = DeviceParams()
P0 = DeviceParams(sigma_decades=0.0)


def with_resistances(values):
    """Single-column crossbar whose cells hold exactly ``values``."""
    cb = Crossbar(len(values), 1, P0, seed=0)
    cb._resistance[:, 0] = values
    return cb


def test_new_crossbar_single_cell():
    cb = new_crossbar(1, 1, P, 3)
    c = cb.cell(0, 0)
    assert c.phase is PhaseState.AMORPHOUS
    assert (c.set_count, c.reset_count, c.read_count) == (0, 0, 0)


def test_new_crossbar_degenerate_sampling():
    cb = new_crossbar(16, 64, P0, 1)
    assert (cb.resistances == 1e8).all()


def test_new_crossbar_deterministic():
    a = new_crossbar(4, 8, P, 11)
    b = new_crossbar(4, 8, P, 11)
    assert np.array_equal(a.resistances, b.resistances)
    a.program_row(1, "10110011")
    b.program_row(1, "10110011")
    assert np.array_equal(a.resistances, b.resistances)


@pytest.mark.parametrize("rows, cols", [(0, 4), (4, 0), (-1, 1)])
def test_invalid_dimensions(rows, cols):
    with pytest.raises(InvalidDimensions):
        Crossbar(rows, cols, P)


def test_program_row_phases():
    cb = new_crossbar(2, 4, P, 0).program_row(0, "1010")
    phases = [cb.cell(0, c).phase for c in range(4)]
    C, A = PhaseState.CRYSTALLINE, PhaseState.AMORPHOUS
    assert phases == [C, A, C, A]
    assert cb.stored_bits(0).tolist() == [1, 0, 1, 0]


def test_program_row_all_ones_sigma0():
    cb = new_crossbar(2, 4, P0, 0).program_row(1, [1, 1, 1, 1])
    assert (cb.resistances[1] == 1e3).all()


def test_reprogram_same_pattern_counts_cycles():
    cb = new_crossbar(1, 4, P, 0).program_row(0, "1100")
    before = [cb.cell(0, c).phase for c in range(4)]
    cb.program_row(0, "1100")
    assert [cb.cell(0, c).phase for c in range(4)] == before
    assert [cb.cell(0, c).set_count for c in range(4)] == [2, 2, 0, 0]
    assert [cb.cell(0, c).reset_count for c in range(4)] == [0, 0, 2, 2]


def test_program_row_errors():
    cb = new_crossbar(2, 4, P, 0)
    with pytest.raises(IndexOutOfRange):
        cb.program_row(2, "1010")
    with pytest.raises(InvalidDimensions):
        cb.program_row(0, "101")
    with pytest.raises(InvalidDimensions):
        cb.program_row(0, "10a0")


def test_program_row_matches_cell_by_cell_pulses():
    """Row programming equals applying one pulse per cell, column by column, on the same stream."""
    cb = new_crossbar(3, 5, P, 21)
    cb.program_row(2, "01101")
    rng = np.random.default_rng(21)
    init = [[float(r) for r in row] for row in 1e8 * 10.0 ** (0.1 * rng.standard_normal((3, 5)))]
    assert cb.resistances[:2].tolist() == init[:2]
    for c, bit in enumerate("01101"):
        cell = apply_pulse(Cell(resistance_ohms=init[2][c]), SET_PULSE if bit == "1" else RESET_PULSE, P, rng)
        assert cb.cell(2, c) == cell


def test_bitline_examples():
    assert with_resistances([1e8, 1e8]).bitline_resistance({0, 1}, 0) == pytest.approx(5e7, rel=1e-15)
    r = with_resistances([1e3, 1e8]).bitline_resistance({0, 1}, 0)
    assert r == pytest.approx(float(parallel_exact([1e3, 1e8])), rel=1e-14)
    assert r == pytest.approx(999.99, abs=5e-3)
    r3 = with_resistances([1e3, 1e3, 1e3]).bitline_resistance({0, 1, 2}, 0)
    assert r3 == pytest.approx(1e3 / 3, rel=1e-14)


@pytest.mark.parametrize(
    "bits, expected",
    [("11", 0.8e-3), ("00", 8e-9), ("000", 12e-9)],
)
def test_bitline_current_examples(bits, expected):
    cb = new_crossbar(len(bits), 1, P0, 0)
    for r, b in enumerate(bits):
        cb.program_row(r, b)
    assert cb.bitline_current(range(len(bits)), 0, 0.4) == pytest.approx(expected, rel=1e-12)


def test_bitline_errors():
    cb = new_crossbar(2, 2, P, 0)
    with pytest.raises(EmptyActivation):
        cb.bitline_resistance([], 0)
    with pytest.raises(IndexOutOfRange):
        cb.bitline_resistance([0, 2], 0)
    with pytest.raises(IndexOutOfRange):
        cb.bitline_resistance([0], 2)


resistance_lists = st.lists(st.floats(1.0, 1e10), min_size=1, max_size=8)


@given(resistance_lists)
def test_parallel_below_min(values):
    cb = with_resistances(values)
    r = cb.bitline_resistance(range(len(values)), 0)
    assert r == pytest.approx(float(parallel_exact(values)), rel=1e-12)
    if len(values) == 1:
        assert r == values[0]
    else:
        assert r < min(values)


@given(resistance_lists, st.randoms())
def test_parallel_monotone_and_permutation_invariant(values, rnd):
    cb = with_resistances(values)
    rows = list(range(len(values)))
    prefix = [cb.bitline_resistance(rows[: i + 1], 0) for i in range(len(rows))]
    assert all(b <= a for a, b in zip(prefix, prefix[1:]))
    shuffled = values[:]
    rnd.shuffle(shuffled)
    assert with_resistances(shuffled).bitline_resistance(rows, 0) == prefix[-1]


def test_single_row_is_cell_current():
    cb = new_crossbar(3, 6, P, 4).program_row(1, "101100")
    for c in range(6):
        assert cb.bitline_current([1], c, 0.4) == cell_current(cb.cell(1, c), 0.4)


def test_vector_currents_match_scalar():
    cb = new_crossbar(4, 16, P, 8)
    rnd = random.Random(0)
    for r in range(4):
        cb.program_row(r, [rnd.randint(0, 1) for _ in range(16)])
    vec = cb.bitline_currents([0, 2, 3])
    assert vec.tolist() == [cb.bitline_current([3, 0, 2], c) for c in range(16)]


def test_record_read_only_touches_active_rows():
    cb = new_crossbar(3, 2, P, 0)
    cb.record_read([0, 2])
    assert [cb.cell(r, 0).read_count for r in range(3)] == [1, 0, 1]
