"""JSON run configuration: array size, device parameters and program pulses."""

from __future__ import annotations

import json
import os
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path

from .device import (
    RESET_PULSE,
    SET_PULSE,
    DeviceParams,
    PulseClass,
    PulseSpec,
    classify_pulse,
)
from .errors import AmbiguousPulse, ConfigError

ENV_VAR = "PINATUBO_SIM_CONFIG"

_DEVICE_FIELDS = {f.name for f in fields(DeviceParams)}
_PULSE_FIELDS = {f.name for f in fields(PulseSpec)}


@dataclass(frozen=True)
class Config:
    rows: int = 16
    cols: int = 64
    device: DeviceParams = field(default_factory=DeviceParams)
    set_pulse: PulseSpec = SET_PULSE
    reset_pulse: PulseSpec = RESET_PULSE

    @property
    def seed(self) -> int:
        return self.device.seed

    def with_overrides(self, *, sigma: float | None = None, seed: int | None = None) -> "Config":
        changes = {}
        if sigma is not None:
            changes["sigma_decades"] = sigma
        if seed is not None:
            changes["seed"] = seed
        if not changes:
            return self
        try:
            return replace(self, device=replace(self.device, **changes))
        except ValueError as exc:
            raise ConfigError(str(exc)) from None

    def to_dict(self) -> dict:
        """Flat JSON-ready form; ``from_dict(to_dict())`` reproduces the config."""
        d = {"rows": self.rows, "cols": self.cols}
        d.update(asdict(self.device))
        d["set_pulse"] = asdict(self.set_pulse)
        d["reset_pulse"] = asdict(self.reset_pulse)
        return d


def _number(key: str, value, kind=float):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"field {key!r}: expected a number, got {value!r}")
    if kind is int:
        if float(value) != int(value):
            raise ConfigError(f"field {key!r}: expected an integer, got {value!r}")
        return int(value)
    return float(value)


def _pulse(key: str, value, default: PulseSpec) -> PulseSpec:
    if not isinstance(value, dict):
        raise ConfigError(f"field {key!r}: expected an object")
    unknown = set(value) - _PULSE_FIELDS
    if unknown:
        raise ConfigError(f"field {key!r}: unknown keys {sorted(unknown)}")
    try:
        return replace(default, **{k: _number(f"{key}.{k}", v) for k, v in value.items()})
    except ValueError as exc:
        raise ConfigError(f"field {key!r}: {exc}") from None


def from_dict(data: dict) -> Config:
    if not isinstance(data, dict):
        raise ConfigError("config must be a JSON object")
    known = _DEVICE_FIELDS | {"rows", "cols", "set_pulse", "reset_pulse"}
    unknown = sorted(set(data) - known)
    if unknown:
        raise ConfigError(f"unknown config field(s): {', '.join(unknown)}")

    top = {}
    for key in ("rows", "cols"):
        if key in data:
            top[key] = _number(key, data[key], int)
            if top[key] < 1:
                raise ConfigError(f"field {key!r}: must be >= 1")
    for key, default in (("set_pulse", SET_PULSE), ("reset_pulse", RESET_PULSE)):
        if key in data:
            top[key] = _pulse(key, data[key], default)

    dev = {}
    for key in _DEVICE_FIELDS & set(data):
        dev[key] = _number(key, data[key], int if key == "seed" else float)
    try:
        device = DeviceParams(**dev)
    except ValueError as exc:
        raise ConfigError(f"device parameters: {exc}") from None
    cfg = Config(device=device, **top)
    for key, want in (("set_pulse", PulseClass.SET), ("reset_pulse", PulseClass.RESET)):
        try:
            got = classify_pulse(getattr(cfg, key), device)
        except AmbiguousPulse as exc:
            raise ConfigError(f"field {key!r}: {exc}") from None
        if got is not want:
            raise ConfigError(f"field {key!r}: classifies as {got.value}, not {want.value}")
    return cfg


def loads(text: str) -> Config:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    return from_dict(data)


def load(path: str | os.PathLike | None = None) -> Config:
    """Load ``path``, else the file named by ``$PINATUBO_SIM_CONFIG``, else defaults."""
    if path is None:
        path = os.environ.get(ENV_VAR) or None
    if path is None:
        return Config()
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
    try:
        return loads(text)
    except ConfigError as exc:
        raise ConfigError(f"{path}: {exc}") from None


def dumps(cfg: Config) -> str:
    return json.dumps(cfg.to_dict(), indent=2) + "\n"
