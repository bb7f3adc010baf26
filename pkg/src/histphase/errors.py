"""Exception hierarchy shared by all modules."""


class HistoriesError(Exception):
    """Base class for domain errors raised by histphase."""


class PreconditionError(HistoriesError, ValueError):
    """An argument violates a documented precondition."""


class DivergenceError(HistoriesError):
    """The requested quantity does not exist (non-convergent integral).

    Raised in particular for the P representation (s = -1), where the
    ordering kernel cancels the Gaussian damping of the coherent-state trace.
    """


class GridMismatchError(PreconditionError):
    """Two paths that must share a time grid do not."""


class TruncationError(HistoriesError):
    """A Fock-space result moved by more than the tolerance when the
    truncation dimension was enlarged."""


class TruncationWarning(UserWarning):
    """Amplitudes approach the truncation dimension."""
