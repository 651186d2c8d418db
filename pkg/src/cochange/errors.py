"""Exception hierarchy shared by all pipeline stages."""


class CochangeError(Exception):
    """Base class for all errors raised by this package."""


class ParseError(CochangeError):
    """Malformed change-log input. Carries the 1-based line number."""

    def __init__(self, message: str, line_number: int):
        super().__init__(f"line {line_number}: {message}")
        self.line_number = line_number


class ConfigError(CochangeError):
    """Invalid configuration: bad flag value, pattern, window layout, or table key."""


class ValidationError(CochangeError):
    """Input data violates a documented contract (bad shape, bad value, duplicate key)."""


class DegenerateInputError(CochangeError):
    """Input is structurally valid but the quantity is undefined on it
    (edgeless graph, empty window, zero variance)."""
