"""Exception hierarchy shared by every module of the package."""

from __future__ import annotations


class StrongMatchError(Exception):
    """Base class for all errors raised by :mod:`strongmatch`."""


# graph construction and queries
class SelfLoop(StrongMatchError, ValueError):
    pass


class DuplicateEdge(StrongMatchError, ValueError):
    pass


class VertexOutOfRange(StrongMatchError, ValueError):
    pass


class EmptyGraph(StrongMatchError, ValueError):
    pass


class GraphFormatError(StrongMatchError, ValueError):
    pass


# matchings and bounds
class UnknownEdgeId(StrongMatchError, ValueError):
    pass


class NotAMatching(StrongMatchError, ValueError):
    pass


class BudgetExceeded(StrongMatchError, RuntimeError):
    pass


class IsolatedEdgePresent(StrongMatchError, ValueError):
    pass


class ZeroDenominator(StrongMatchError, ArithmeticError):
    pass


class KTooSmall(StrongMatchError, ValueError):
    pass


class ZeroMinNeighborhood(StrongMatchError, ArithmeticError):
    pass


# weights
class InvalidModel(StrongMatchError, ValueError):
    pass


class UnboundedMoment(StrongMatchError, ValueError):
    pass


class NoFeasibleGamma(StrongMatchError, ValueError):
    pass


class TooFewTrials(StrongMatchError, ValueError):
    pass


# random graphs
class InvalidParameterOrder(StrongMatchError, ValueError):
    pass


class ProbabilityOverflow(StrongMatchError, ValueError):
    pass


class EmptyVertexSet(StrongMatchError, ValueError):
    pass


class InfeasibleModel(StrongMatchError, ValueError):
    pass


# experiments
class DegenerateInput(StrongMatchError, ValueError):
    pass


class EpsilonOutOfRange(StrongMatchError, ValueError):
    pass


class ConfigError(StrongMatchError, ValueError):
    """Invalid experiment configuration; ``field`` names the offending key."""

    def __init__(self, message: str, field: str | None = None, path: str | None = None):
        self.field = field
        self.path = path
        prefix = ""
        if path:
            prefix += f"{path}: "
        if field:
            prefix += f"field {field!r}: "
        super().__init__(prefix + message)
