"""Exception hierarchy shared by every stage of the pipeline."""


class NearCutError(Exception):
    """Base class for all library errors."""


class ParameterError(NearCutError, ValueError):
    """An argument is outside its documented domain."""


class InvalidShoreError(ParameterError):
    """A vertex set is empty or equal to the whole vertex set."""


class GraphFormatError(ParameterError):
    """A graph file or edge list is malformed."""


class BudgetError(NearCutError):
    """An exhaustive search was asked to exceed its size budget."""


class IntegrityError(NearCutError):
    """An internal invariant failed; indicates a bug or an invalid input family."""


class RepresentationError(IntegrityError):
    """No polygon representation consistent with the cut family was found."""


class CoverError(IntegrityError):
    """A cover produced from the recursion trace does not cover its cut."""

    def __init__(self, message, uncovered_edge=None):
        super().__init__(message)
        self.uncovered_edge = uncovered_edge


class RoundingError(IntegrityError):
    """Iterative rounding reached a vertex with nothing to fix or drop."""

    def __init__(self, message, dump=None):
        super().__init__(message)
        self.dump = dump or {}


class StructuralError(NearCutError):
    """An edge set claimed to be a spanning tree is not one."""
