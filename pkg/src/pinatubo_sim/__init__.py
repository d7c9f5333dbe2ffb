"""Behavioral simulator of sense-amplifier bitwise logic on PCM crossbars."""

from .analysis import margin_sweep, region_histogram, truth_table
from .crossbar import Crossbar, new_crossbar
from .device import (
    Cell,
    DeviceParams,
    PhaseState,
    PulseClass,
    PulseSpec,
    apply_pulse,
    cell_current,
    classify_pulse,
    sample_resistance,
)
from .engine import OpStats, bulk_op, parse_script, run_script
from .errors import (
    AmbiguousPulse,
    ArityMismatch,
    EmptyActivation,
    FeasibilityWarning,
    IndexOutOfRange,
    InfeasibleGate,
    InvalidDimensions,
    ParseError,
)
from .sense_amp import (
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
)

__version__ = "0.1.0"
