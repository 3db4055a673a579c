"""Exception hierarchy shared by every module."""


class HypersparseError(Exception):
    """Base class for all library errors."""


class InvalidEdge(HypersparseError, ValueError):
    pass


class InvalidCut(HypersparseError, ValueError):
    pass


class NotASubgraph(HypersparseError, ValueError):
    pass


class NoCut(HypersparseError, ValueError):
    pass


class TooLarge(HypersparseError, ValueError):
    pass


class IncompatibleSketches(HypersparseError, ValueError):
    pass


class DeletionBudgetExceeded(HypersparseError, RuntimeError):
    pass


class StreamTooLong(HypersparseError, ValueError):
    """More updates than the level cascade can subsample."""


class RecoveryFailure(HypersparseError, RuntimeError):
    """A sketch could not be opened; the run counts as a probabilistic failure.

    ``phase`` is 1 for component recovery and 2 for low-strength recovery.
    ``partial`` optionally carries whatever was recovered before giving up.
    """

    def __init__(self, message, *, level=None, phase=None, partial=None):
        super().__init__(message)
        self.level = level
        self.phase = phase
        self.partial = partial


class MalformedInput(HypersparseError, ValueError):
    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line
