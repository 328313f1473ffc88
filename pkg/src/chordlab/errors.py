"""Exception hierarchy shared by every chordlab module."""


class ChordlabError(Exception):
    """Base class for all chordlab failures."""


class DomainError(ChordlabError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class ConvergenceError(ChordlabError, ArithmeticError):
    """A series did not reach its tolerance within the allowed number of terms."""


class QuadratureError(ChordlabError, ArithmeticError):
    """Adaptive quadrature could not meet its tolerance at the depth cap."""


class SingularityError(ChordlabError, ArithmeticError):
    """Evaluation requested exactly at a non-integrable blow-up point."""


class ParallelLinesError(ChordlabError, ArithmeticError):
    """Two lines are parallel (to tolerance) and distinct, so they never meet."""


class CoincidentLinesError(ParallelLinesError):
    """Two lines coincide, so their intersection is not a point."""


class DegenerateChordError(ChordlabError, ValueError):
    """Both chord endpoints are the same point of the circle."""


class AtomError(ChordlabError, ValueError):
    """A tabulated measure carries a point mass where an atomless one is needed."""


class AmbiguityError(ChordlabError, ArithmeticError):
    """Point deduplication found clusters too close to separate at the snap tolerance."""
