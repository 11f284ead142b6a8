"""Exception hierarchy.

Input problems derive from :class:`InputError` (CLI exit code 2); exhausted
budgets derive from :class:`ResourceExceeded` (exit code 3).
"""

from __future__ import annotations


class StrongImplError(Exception):
    pass


class InputError(StrongImplError, ValueError):
    """Malformed or inconsistent input data."""


class PriorNotNormalized(InputError):
    pass


class NegativePrior(InputError):
    pass


class ZeroMarginal(InputError):
    pass


class MissingEntry(InputError):
    pass


class UnknownLabel(InputError):
    pass


class NotSingleAgent(InputError):
    pass


class NotAnEquilibrium(InputError):
    pass


class DimensionMismatch(InputError):
    pass


class IncompleteLabeling(InputError):
    pass


class MissingPlanEntry(InputError):
    pass


class ResourceExceeded(StrongImplError):
    """A configured limit was hit before a verdict was reached."""

    def __init__(self, message: str, statistics: dict | None = None):
        super().__init__(message)
        self.statistics = dict(statistics or {})


class BudgetExceeded(ResourceExceeded):
    """Equilibrium enumeration would exceed the profile budget."""
