"""Exception hierarchy shared by every module."""


class FairDivisionError(Exception):
    """Base class for all errors raised by fairmech."""


class MalformedInputError(FairDivisionError, ValueError):
    """Input has the wrong shape, sign or encoding."""


class ScaleLimitError(FairDivisionError):
    """An exhaustive routine was asked to enumerate more than its budget."""


class UnboundedError(FairDivisionError):
    """An objective or an edge direction is unbounded."""


class BlockedEdgeError(FairDivisionError):
    """The requested edge leaves the vertex with step length zero."""


class RegularityError(FairDivisionError, ValueError):
    """A bipartite multigraph is not regular."""


class InvariantViolation(FairDivisionError, AssertionError):
    """A guarantee that should hold by construction failed its audit."""
