"""Semantic exceptions shared across the toolkit."""


class CapboundError(Exception):
    """Base class for all toolkit errors."""


class DomainError(CapboundError, ValueError):
    """Inputs violate a documented contract (range, shape, vocabulary)."""


class PreconditionError(DomainError):
    """An operation was called outside its declared precondition."""

    def __init__(self, message: str, reason: str):
        super().__init__(message)
        self.reason = reason


class RegimeNotCovered(DomainError):
    """Parameters fall outside the analyzed regime."""

    code = "regime_not_covered"


class BoundednessError(DomainError):
    """A halfspace set leaves a coordinate direction unbounded."""

    def __init__(self, direction: str):
        super().__init__(f"region is unbounded in the {direction} direction")
        self.direction = direction


class NumericsError(CapboundError):
    """A numerical guard tripped (non-PSD conditioning, infeasible vertex)."""
