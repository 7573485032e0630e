"""Exception hierarchy shared by every qct module."""


class QctError(Exception):
    """Base class for all simulator errors."""


class ZeroVector(QctError, ValueError):
    pass


class CapacityExceeded(QctError, ValueError):
    pass


class IndexOutOfRange(QctError, IndexError):
    pass


class DegenerateState(QctError, ArithmeticError):
    """Projector mass vanished where the state invariants say it cannot."""


class DimensionMismatch(QctError, ValueError):
    pass


class NotUnitary(QctError, ValueError):
    pass


class KeyLengthMismatch(QctError, ValueError):
    pass


class InsufficientSamples(QctError, ValueError):
    pass


class BatchTooSmall(QctError, ValueError):
    pass


class RetriesExhausted(QctError, RuntimeError):
    """Every attempt of a key-establishment subprotocol was flagged compromised."""

    def __init__(self, message, attempts=()):
        super().__init__(message)
        self.attempts = list(attempts)


class ConfigError(QctError, ValueError):
    pass


class ParseError(ConfigError):
    def __init__(self, message, line=None, column=None):
        where = f" (line {line}, column {column})" if line is not None else ""
        super().__init__(f"{message}{where}")
        self.line = line
        self.column = column


class ValidationError(ConfigError):
    def __init__(self, field, message):
        super().__init__(f"{field}: {message}")
        self.field = field
