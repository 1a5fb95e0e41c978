"""Exception types shared across the package."""


class FloodRouteError(Exception):
    """Base class for all domain errors raised by floodroute."""


class GridParseError(FloodRouteError):
    """A grid or image file failed to parse.

    Carries the 1-based line number of the offending line when known.
    """

    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class GeometryMismatch(FloodRouteError):
    """Two rasters with different geometries were combined without alignment."""


class RoadNetError(FloodRouteError):
    """A road-network file violated the scenario JSON schema or an invariant."""


class ScenarioError(FloodRouteError):
    """A scenario manifest or one of its components failed to load."""
