"""Exception types raised across the pipeline."""


class AerialSynthError(Exception):
    """Base class for every error raised by this package."""


class GeometryError(AerialSynthError):
    """Degenerate or otherwise invalid box geometry."""


class AnnotationParseError(AerialSynthError):
    """Malformed annotation content.

    Carries the 1-based line number of the offending line when known.
    """

    def __init__(self, message: str, line_number: int | None = None, source: str | None = None):
        self.line_number = line_number
        self.source = source
        prefix = ""
        if source:
            prefix += f"{source}: "
        if line_number is not None:
            prefix += f"line {line_number}: "
        super().__init__(prefix + message)


class DatasetError(AerialSynthError):
    """Dataset discovery or indexing failure."""


class PoolError(AerialSynthError):
    """Instance pool is missing, empty, or unreadable."""


class CompositionError(AerialSynthError):
    """Composition cannot proceed (no eligible class, background, or geometry)."""


class ConfigError(AerialSynthError):
    """Configuration values violate their invariants."""
