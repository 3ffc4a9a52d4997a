"""Exception hierarchy shared by every kgcycles module."""


class KGCyclesError(Exception):
    """Base class for all errors raised by this package."""


class ParseError(KGCyclesError, ValueError):
    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class ValidationError(KGCyclesError, ValueError):
    pass


class RangeError(KGCyclesError, ValueError):
    pass


class SeriesDivisionError(KGCyclesError, ZeroDivisionError):
    pass


class DegenerateSegmentError(KGCyclesError, ValueError):
    pass


class SingularDesignError(KGCyclesError, ValueError):
    pass


class FeasibilityError(KGCyclesError, ValueError):
    pass


class DivergenceError(KGCyclesError, ValueError):
    pass


class DomainError(KGCyclesError, ValueError):
    pass


class FetchError(KGCyclesError, OSError):
    pass


class CacheMissError(FetchError):
    pass


class StageError(KGCyclesError):
    """A pipeline stage failed; ``stage`` names it and ``__cause__`` holds the original."""

    def __init__(self, stage, cause):
        self.stage = stage
        super().__init__(f"[{stage}] {type(cause).__name__}: {cause}")
