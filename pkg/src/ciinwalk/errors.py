"""Exception types shared across the package."""


class InvalidSizeError(ValueError):
    """Graph side size is not a valid positive integer >= 2."""


class UnsupportedSizeError(ValueError):
    """A schedule variant does not support this side size (parity/divisibility)."""


class ThetaNotRealError(ValueError):
    """Requested iteration count is below the minimum for a real-valued phase angle."""


class MappingUnavailableError(ValueError):
    """No valid integer walk-time pair exists for the entangled-to-marked mapping."""


class DimensionMismatchError(ValueError):
    """Operator or state dimensions are inconsistent."""
