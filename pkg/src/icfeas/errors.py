"""Exception hierarchy shared by all icfeas modules."""

from __future__ import annotations


class IcfeasError(Exception):
    """Base class for every error raised by this package."""


class SchemaError(IcfeasError):
    """Instance description is malformed (wrong types, missing keys)."""


class InvariantError(IcfeasError):
    """Instance is well formed but violates a model invariant."""


class EmptySubset(IcfeasError):
    pass


class DimensionMismatch(IcfeasError):
    pass


class ZeroSubspace(IcfeasError):
    pass


class NotAnAlignmentSet(IcfeasError):
    pass


class NotAlignmentEdge(IcfeasError):
    pass


class EndpointsInConflict(IcfeasError):
    pass


class IndexMismatch(IcfeasError):
    pass


class NotMaximal(IcfeasError):
    pass


class ConditionViolation(IcfeasError):
    pass


class CoverageError(IcfeasError):
    pass


class BudgetExceeded(IcfeasError):
    """Search-node cap hit; the answer is unknown, not negative."""

    def __init__(self, message: str, nodes_explored: int = 0):
        super().__init__(message)
        self.nodes_explored = nodes_explored


class ConstructionFailed(IcfeasError):
    """Base for construction failures; carries the per-policy report."""

    def __init__(self, message: str, report: list | None = None):
        super().__init__(message)
        self.report = report or []


class NoQualifyingContraction(ConstructionFailed):
    pass


class RetryExhausted(ConstructionFailed):
    pass
