"""Exception hierarchy shared across the package."""


class ShapecastError(Exception):
    """Base class for all domain errors raised by this package."""


class GridMismatchError(ShapecastError):
    """Vectors or segments do not live on the same grid / length."""


class IngestError(ShapecastError):
    """Raw input file could not be parsed or violates its schema."""


class EmptyCandidateError(ShapecastError):
    """No candidate day matched the target group within the lookback window."""


class MissingTemperatureError(ShapecastError):
    """A candidate lacks temperature data on the comparison mask."""


class InsufficientHistoryError(ShapecastError):
    """Not enough history for the requested operation."""
