"""Exception hierarchy shared by all tropjac modules."""


class TropJacError(Exception):
    """Base class for all tropjac errors."""


# -- graph construction ------------------------------------------------------

class GraphError(TropJacError):
    pass


class DisconnectedGraph(GraphError):
    pass


class DanglingReference(GraphError):
    pass


class NegativeGenus(GraphError):
    pass


class DuplicateId(GraphError):
    pass


class OutOfSupportedRange(TropJacError):
    pass


# -- lattice / monoid --------------------------------------------------------

class AmbientTooLarge(TropJacError):
    pass


# -- divisors ----------------------------------------------------------------

class LoopSlopeNonzero(TropJacError):
    pass


class NotATree(TropJacError):
    pass


class WeightSumMismatch(TropJacError):
    pass


class Infeasible(TropJacError):
    pass


# -- enumeration -------------------------------------------------------------

class TooManyEdges(TropJacError):
    pass


class BoundTooSmall(TropJacError):
    pass


# -- rubber ------------------------------------------------------------------

class TooManyVertices(TropJacError):
    pass


class NotTotallyOrdered(TropJacError):
    pass


class DegenerateDivisor(TropJacError):
    pass
