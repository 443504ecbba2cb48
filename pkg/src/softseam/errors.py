"""Exception hierarchy for softseam.

Public functions never raise bare ValueError for contract violations;
they raise one of these so callers can distinguish bad input from bugs.
"""

from __future__ import annotations


class SoftseamError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(SoftseamError, ValueError):
    """Input violates a value-domain contract (non-finite, out of range,
    off the open simplex, wrong sign, ...)."""


class DimensionError(SoftseamError, ValueError):
    """Vector dimensions are incompatible or below the minimum d = 2."""


class StepRejection(SoftseamError):
    """A replicator step left the open simplex and was rejected.

    Carries a suggested smaller step size so adaptive drivers can retry.
    """

    def __init__(self, message: str, suggested_dt: float):
        super().__init__(message)
        self.suggested_dt = suggested_dt
