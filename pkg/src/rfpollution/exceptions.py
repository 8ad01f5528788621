class ConfigurationError(ValueError):
    """Inconsistent or unsupported model configuration."""


class EmptyAggregateError(ValueError):
    """An aggregation window contains no pixel centers."""


class GridTooLargeError(MemoryError):
    """The requested raster exceeds the configured pixel cap."""
