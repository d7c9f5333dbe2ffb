"""Single PCM cell model: pulse classification, phase transitions, resistance sampling."""

from __future__ import annotations

import enum
from dataclasses import dataclass, replace

import numpy as np

from .errors import AmbiguousPulse


class PhaseState(enum.Enum):
    AMORPHOUS = "amorphous"  # high resistance, logical '0'
    CRYSTALLINE = "crystalline"  # low resistance, logical '1'


class PulseClass(enum.Enum):
    READ = "read"
    SET = "set"
    RESET = "reset"


@dataclass(frozen=True)
class PulseSpec:
    amplitude_v: float
    rise_ns: float
    width_ns: float
    fall_ns: float

    def __post_init__(self):
        if not self.amplitude_v > 0:
            raise ValueError(f"pulse amplitude must be positive, got {self.amplitude_v}")
        for name in ("rise_ns", "width_ns", "fall_ns"):
            if getattr(self, name) < 0:
                raise ValueError(f"pulse {name} must be non-negative")


# Pulses used in the measured setup.
SET_PULSE = PulseSpec(amplitude_v=2.7, rise_ns=10.0, width_ns=30.0, fall_ns=3000.0)
RESET_PULSE = PulseSpec(amplitude_v=4.0, rise_ns=10.0, width_ns=10.0, fall_ns=10.0)
READ_PULSE = PulseSpec(amplitude_v=0.4, rise_ns=10.0, width_ns=100.0, fall_ns=10.0)


@dataclass(frozen=True)
class DeviceParams:
    """Population parameters for a PCM cell technology.

    Resistances are medians of log-normal distributions; ``sigma_decades`` is
    the standard deviation of log10(R) for both classes.
    """

    r_low_ohms: float = 1e3
    r_high_ohms: float = 1e8
    sigma_decades: float = 0.1
    read_voltage_v: float = 0.4
    read_v_max: float = 0.5
    set_v_min: float = 2.0
    set_v_max: float = 3.5
    set_min_total_ns: float = 100.0
    reset_v_min: float = 3.5
    reset_max_width_ns: float = 50.0
    seed: int = 42

    def __post_init__(self):
        if not 0 < self.r_low_ohms < self.r_high_ohms:
            raise ValueError("need 0 < r_low_ohms < r_high_ohms")
        if not self.sigma_decades >= 0:
            raise ValueError("sigma_decades must be >= 0")
        if not self.read_voltage_v > 0:
            raise ValueError("read_voltage_v must be positive")
        if not self.read_v_max < self.set_v_min < self.set_v_max <= self.reset_v_min:
            raise ValueError(
                "need read_v_max < set_v_min < set_v_max <= reset_v_min"
            )

    def median(self, phase: PhaseState) -> float:
        return self.r_low_ohms if phase is PhaseState.CRYSTALLINE else self.r_high_ohms


@dataclass(frozen=True)
class Cell:
    phase: PhaseState = PhaseState.AMORPHOUS
    resistance_ohms: float = 1e8
    set_count: int = 0
    reset_count: int = 0
    read_count: int = 0

    def __post_init__(self):
        if not self.resistance_ohms > 0:
            raise ValueError("cell resistance must be positive")

    @property
    def bit(self) -> int:
        return 1 if self.phase is PhaseState.CRYSTALLINE else 0


def classify_pulse(pulse: PulseSpec, params: DeviceParams) -> PulseClass:
    """Map a pulse onto the read, set or reset regime.

    Set needs a mid amplitude held long enough to crystallize (width plus the
    slow trailing edge); reset needs a high amplitude quenched quickly.
    """
    amp = pulse.amplitude_v
    if amp <= params.read_v_max:
        return PulseClass.READ
    if params.set_v_min <= amp < params.set_v_max:
        if pulse.width_ns + pulse.fall_ns >= params.set_min_total_ns:
            return PulseClass.SET
        raise AmbiguousPulse(
            f"{amp} V is in the set band but width+fall "
            f"{pulse.width_ns + pulse.fall_ns} ns < {params.set_min_total_ns} ns"
        )
    if amp >= params.reset_v_min:
        if pulse.width_ns <= params.reset_max_width_ns:
            return PulseClass.RESET
        raise AmbiguousPulse(
            f"{amp} V is in the reset band but width {pulse.width_ns} ns "
            f"> {params.reset_max_width_ns} ns"
        )
    raise AmbiguousPulse(f"{amp} V lies between the read and set bands")


def sample_resistance(
    phase: PhaseState, params: DeviceParams, rng: np.random.Generator
) -> float:
    # median * 10**(sigma*z) keeps sigma=0 exact; one normal draw per call regardless.
    z = rng.standard_normal()
    return params.median(phase) * 10.0 ** (params.sigma_decades * z)


def sample_resistances(
    phases: np.ndarray, params: DeviceParams, rng: np.random.Generator
) -> np.ndarray:
    """Vectorized ``sample_resistance``; ``phases`` is a bool array (True = crystalline).

    Consumes the stream in the same order as element-wise scalar calls.
    """
    phases = np.asarray(phases, dtype=bool)
    z = rng.standard_normal(phases.shape)
    medians = np.where(phases, params.r_low_ohms, params.r_high_ohms)
    return medians * 10.0 ** (params.sigma_decades * z)


def apply_pulse(
    cell: Cell, pulse: PulseSpec, params: DeviceParams, rng: np.random.Generator
) -> Cell:
    kind = classify_pulse(pulse, params)
    if kind is PulseClass.READ:
        return replace(cell, read_count=cell.read_count + 1)
    if kind is PulseClass.SET:
        return replace(
            cell,
            phase=PhaseState.CRYSTALLINE,
            resistance_ohms=sample_resistance(PhaseState.CRYSTALLINE, params, rng),
            set_count=cell.set_count + 1,
        )
    return replace(
        cell,
        phase=PhaseState.AMORPHOUS,
        resistance_ohms=sample_resistance(PhaseState.AMORPHOUS, params, rng),
        reset_count=cell.reset_count + 1,
    )


def cell_current(cell: Cell, v_read: float) -> float:
    if not v_read > 0:
        raise ValueError("read voltage must be positive")
    return v_read / cell.resistance_ohms
