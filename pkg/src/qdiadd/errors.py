"""Exception types shared across the toolkit."""


class QDIError(Exception):
    """Base class for every error raised by qdiadd."""


class ConfigError(QDIError):
    """Bad or incomplete cell library / adder configuration."""


class NetlistParseError(QDIError):
    """Netlist text could not be parsed.

    ``line`` and ``column`` are 1-based when the position is known.
    """

    def __init__(self, message, line=None, column=None):
        if line is not None:
            message = f"{message} (line {line}, column {column})"
        super().__init__(message)
        self.line = line
        self.column = column


class NetlistValidationError(QDIError):
    """A netlist violated one or more structural invariants."""

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations) or "invalid netlist")


class SimulationError(QDIError):
    pass


class DeadlockError(SimulationError):
    """The circuit went quiet (or blew its event budget) before completing a phase."""


class ProtocolViolation(SimulationError):
    """An illegal codeword showed up on a dual-rail port."""


class CheckPreconditionError(QDIError):
    """A checker was handed a trace or netlist it cannot judge."""
