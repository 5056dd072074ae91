# backend/errors.py
"""Exception hierarchy shared by the services, the CLI and the API."""
from typing import Optional, Tuple


class MetricDimensionError(Exception):
    """Base class for every domain failure."""


class InputError(MetricDimensionError, ValueError):
    """Invalid parameters, out-of-range vertices or a violated precondition."""


class UnresolvableError(MetricDimensionError):
    """The table has two identical rows, so no column set can separate them."""

    def __init__(self, pair: Tuple[int, int], message: Optional[str] = None):
        self.pair = pair
        super().__init__(message or f"rows {pair[0]} and {pair[1]} are identical")


class InconsistentObservationError(MetricDimensionError):
    """No vertex explains the observed arrival times."""


class ObserversNotDoublyResolvingError(InputError):
    """The observer set cannot tell every pair of sources apart."""


class AllocationError(MetricDimensionError):
    """The requested failure threshold is below what any allocation reaches."""

    def __init__(self, floor: float, threshold: float):
        self.floor = floor
        self.threshold = threshold
        super().__init__(
            f"threshold {threshold:g} unreachable: bound is {floor:g} with every vertex selected"
        )
