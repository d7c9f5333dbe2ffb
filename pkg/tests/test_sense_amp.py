import math
import warnings
from fractions import Fraction

import pytest

from oracle import brute_force_boundaries
from pinatubo_sim.device import DeviceParams
from pinatubo_sim.errors import ArityMismatch, FeasibilityWarning, InfeasibleGate
from pinatubo_sim.sense_amp import (
    AND,
    NOT,
    OR,
    READ,
    XOR,
    LogicOp,
    SenseAmpConfig,
    calibrate,
    class_boundaries,
    margin_ratio,
    sense,
    threshold,
    xor_classes,
)

P = DeviceParams()
P0 = DeviceParams(sigma_decades=0.0)

# Resistances whose adjacent 8-input classes round to the same float.
TIE = DeviceParams(r_low_ohms=1.0, r_high_ohms=1.0 + 2**-52, sigma_decades=0.0)


def _name(op):
    return op.kind.value


@pytest.mark.parametrize(
    "op, n, expected",
    [
        (OR, 2, (999.990000099999, 5e7)),
        (AND, 2, (500.0, 999.990000099999)),
        (READ, 1, (1e3, 1e8)),
    ],
)
def test_class_boundaries_examples(op, n, expected):
    b = class_boundaries(op, n, P)
    assert b == pytest.approx(expected, rel=1e-12)


@pytest.mark.parametrize("n", range(1, 9))
def test_class_boundaries_match_brute_force(n):
    ops = [OR, AND] + [threshold(k) for k in range(1, n + 1)]
    for op in ops:
        got = class_boundaries(op, n, P)
        want = brute_force_boundaries(_name(op), op.k, n, Fraction(10**3), Fraction(10**8))
        assert got.r_one_worst == pytest.approx(float(want[0]), rel=1e-13)
        assert got.r_zero_worst == pytest.approx(float(want[1]), rel=1e-13)


@pytest.mark.parametrize(
    "op, n, ref",
    [(OR, 2, 223.6e3), (OR, 3, 182.6e3), (AND, 2, 707.1)],
)
def test_calibrate_examples(op, n, ref):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", FeasibilityWarning)
        cfg = calibrate(op, n, P)
    assert cfg.ref_primary_ohms == pytest.approx(ref, rel=5e-4)


@pytest.mark.parametrize("n", [2, 3])
def test_hand_picked_or_reference_inside_interval(n):
    b = class_boundaries(OR, n, P)
    assert b.r_one_worst < 100e3 < b.r_zero_worst


def test_xor_calibration_window():
    cfg = calibrate(XOR, 2, P0)
    c = xor_classes(P0)
    assert c.r_both_low < cfg.ref_primary_ohms < c.r_mixed < cfg.ref_secondary_ohms < c.r_both_high
    assert cfg.ref_primary_ohms == pytest.approx(math.sqrt(500 * 999.990000099999), rel=1e-12)


def test_not_calibration_inverts():
    cfg = calibrate(NOT, 1, P)
    assert cfg.invert_output
    assert cfg.ref_primary_ohms == pytest.approx(math.sqrt(1e11), rel=1e-12)


def test_sense_examples():
    cfg = SenseAmpConfig(OR, 2, 100e3)
    assert sense(0.8e-3, cfg, 0.4) == 1
    assert sense(8e-9, cfg, 0.4) == 0
    assert sense(0.4 / 100e3, cfg, 0.4) == 0


def test_sense_not_and_xor():
    not_cfg = calibrate(NOT, 1, P)
    assert sense(0.4e-3, not_cfg, 0.4) == 0
    assert sense(4e-9, not_cfg, 0.4) == 1
    xor_cfg = calibrate(XOR, 2, P0)
    assert sense(0.8e-3, xor_cfg, 0.4) == 0
    assert sense(0.4 / 999.99, xor_cfg, 0.4) == 1
    assert sense(8e-9, xor_cfg, 0.4) == 0
    assert sense(0.4 / xor_cfg.ref_primary_ohms, xor_cfg, 0.4) == 0
    assert sense(0.4 / xor_cfg.ref_secondary_ohms, xor_cfg, 0.4) == 0


def test_margin_ratio_examples():
    assert margin_ratio(OR, 2, P) == pytest.approx(5.0e4, rel=1e-4)
    assert margin_ratio(AND, 2, P) == pytest.approx(2.0, rel=1e-4)


@pytest.mark.parametrize("n", [10, 50, 200])
def test_and_margin_tends_to_n_over_n_minus_1(n):
    # R(n-1 low, 1 high) / R(n low) == G(n low) / G(n-1 low, 1 high)
    exact = Fraction(n, 10**3) / (Fraction(n - 1, 10**3) + Fraction(1, 10**8))
    assert margin_ratio(AND, n, P) == pytest.approx(float(exact), rel=1e-12)
    assert margin_ratio(AND, n, P) == pytest.approx(n / (n - 1), rel=1e-4)


def test_or_margin_decreasing_and_wide():
    margins = [margin_ratio(OR, n, P) for n in range(1, 9)]
    assert all(b < a for a, b in zip(margins, margins[1:]))
    assert min(margins) > 1e4


@pytest.mark.parametrize("op", [OR, AND, threshold(1)])
def test_single_input_gates_coincide_with_read(op):
    assert class_boundaries(op, 1, P) == class_boundaries(READ, 1, P)
    assert calibrate(op, 1, P).ref_primary_ohms == calibrate(READ, 1, P).ref_primary_ohms


def test_calibrated_reference_sandwich():
    for n in range(1, 9):
        for op in [OR, AND] + [threshold(k) for k in range(1, n + 1)]:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", FeasibilityWarning)
                ref = calibrate(op, n, P).ref_primary_ohms
            b = class_boundaries(op, n, P)
            assert b.r_one_worst < ref < b.r_zero_worst
            assert ref / b.r_one_worst == pytest.approx(b.r_zero_worst / ref, rel=1e-9)


def test_feasibility_warning():
    with pytest.warns(FeasibilityWarning):
        calibrate(AND, 2, P)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        calibrate(OR, 2, P)
        calibrate(AND, 2, P0)


def test_infeasible_gate():
    with pytest.raises(InfeasibleGate):
        class_boundaries(threshold(4), 8, TIE)
    with pytest.raises(InfeasibleGate):
        calibrate(AND, 8, TIE)


@pytest.mark.parametrize(
    "op, n",
    [(XOR, 3), (NOT, 2), (READ, 2), (threshold(3), 2), (OR, 0)],
)
def test_arity_errors(op, n):
    with pytest.raises(ArityMismatch):
        calibrate(op, n, P)


@pytest.mark.parametrize(
    "text, op",
    [("or", OR), ("AND", AND), ("xor", XOR), ("not", NOT), ("read", READ),
     ("thresh:3", threshold(3)), ("threshold=2", threshold(2))],
)
def test_parse_op(text, op):
    assert LogicOp.parse(text) == op
    assert LogicOp.parse(str(op)) == op


@pytest.mark.parametrize("text", ["nand", "thresh", "thresh:0", ""])
def test_parse_op_rejects(text):
    with pytest.raises(ValueError):
        LogicOp.parse(text)


def test_config_invariants():
    with pytest.raises(ValueError):
        SenseAmpConfig(OR, 2, 0.0)
    with pytest.raises(ValueError):
        SenseAmpConfig(XOR, 2, 100.0)
    with pytest.raises(ValueError):
        SenseAmpConfig(XOR, 2, 100.0, 50.0)
    with pytest.raises(ValueError):
        SenseAmpConfig(OR, 2, 100.0, invert_output=True)
