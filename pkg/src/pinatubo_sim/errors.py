"""Exception hierarchy shared across the simulator."""


class PinatuboError(Exception):
    """Base class for every error raised by the simulator."""


class AmbiguousPulse(PinatuboError, ValueError):
    """A pulse falls outside the read, set and reset regimes."""


class InvalidDimensions(PinatuboError, ValueError):
    pass


class IndexOutOfRange(PinatuboError, IndexError):
    pass


class EmptyActivation(PinatuboError, ValueError):
    pass


class InfeasibleGate(PinatuboError, ValueError):
    """The '1' and '0' resistance classes of a gate overlap or touch."""


class ArityMismatch(PinatuboError, ValueError):
    pass


class OperandConflict(PinatuboError, ValueError):
    """Destination row is also a source row, or a source row is repeated."""


class ParseError(PinatuboError, ValueError):
    def __init__(self, line: int, reason: str):
        self.line = line
        self.reason = reason
        super().__init__(f"line {line}: {reason}")


class ConfigError(PinatuboError, ValueError):
    pass


class FeasibilityWarning(UserWarning):
    """Calibrated margin is narrower than the device spread can tolerate."""
