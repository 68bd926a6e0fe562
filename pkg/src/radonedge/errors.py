"""Exception hierarchy shared by all modules."""


class RadonEdgeError(Exception):
    """Base class for package errors."""


class InputError(RadonEdgeError, ValueError):
    """An argument violates a documented precondition."""


class GeometryError(RadonEdgeError):
    """A point or direction is not in the configuration an operation needs."""


class ChartError(GeometryError):
    """The latitude/longitude chart degenerates (pole proximity)."""


class RangeError(RadonEdgeError):
    """A sample index falls outside the measured affine range."""

    def __init__(self, message, direction_index=None):
        super().__init__(message)
        self.direction_index = direction_index


class NumericError(RadonEdgeError):
    """A numerical procedure has too little data to be meaningful."""


class ConfigError(RadonEdgeError):
    """An experiment config could not be parsed or validated."""

    def __init__(self, message, line=None, key=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line
        self.key = key
