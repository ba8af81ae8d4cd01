"""Exception hierarchy.

Two families matter to callers: :class:`PlanningError` subclasses signal a
physically infeasible request (the CLI maps them to exit code 2), while
:class:`ConfigError` subclasses signal malformed input (exit code 64).
"""


class TrapzoptError(Exception):
    """Base class for every error raised by this package."""


class PlanningError(TrapzoptError):
    """A request that is well formed but cannot be realised."""


class ConfigError(TrapzoptError):
    """Malformed or inconsistent user input."""


class InfeasibleProfile(PlanningError):
    """The requested (v, a, T) combination has no trapezoidal profile."""


class EmptyTrajectory(PlanningError):
    """Fewer than two waypoints were supplied."""


class UnsupportedMoveType(PlanningError):
    """Only joint-space moves can be planned."""


class ZeroLengthSegment(PlanningError):
    """Two consecutive waypoints coincide."""


class ParamCountMismatch(PlanningError):
    """Number of (v, a) pairs does not match the number of segments."""


class JointLimitExceeded(PlanningError):
    """A planned segment exceeds a joint velocity or acceleration bound."""

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(str(v) for v in self.violations))


class DegenerateRange(TrapzoptError):
    """Min-max normalisation of a constant column."""


class InvalidImprovement(TrapzoptError):
    """Best fitness is worse than the candidate it is compared against."""


class InsufficientRows(PlanningError):
    """A sweep produced too few feasible rows to normalise."""


class NoFeasiblePoint(PlanningError):
    """The optimizer never evaluated a feasible candidate."""


class ObjectiveFailure(TrapzoptError):
    """An objective raised on an in-bounds point."""


class BadConfig(ConfigError):
    """Optimizer configuration violates its invariants."""
