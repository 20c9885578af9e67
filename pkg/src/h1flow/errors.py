"""Exception types raised by the toolkit."""


class H1FlowError(Exception):
    """Base class for all errors raised by h1flow."""


class ZeroArea(H1FlowError, ZeroDivisionError):
    """Signed area is zero (to the relative guard) where a quotient by it is needed."""


class DegenerateSpeed(H1FlowError, ValueError):
    pass


class TruncationTooSmall(H1FlowError, ValueError):
    pass


class StepFailure(H1FlowError, RuntimeError):
    pass


class AreaCollapse(H1FlowError, RuntimeError):
    pass


class NonPositiveArea(H1FlowError, ValueError):
    pass


class SeriesTooShort(H1FlowError, ValueError):
    pass


class AmbiguousFrequency(H1FlowError, ValueError):
    """The two strongest frequencies carry nearly equal energy.

    ``candidates`` holds the two competing frequencies, strongest first.
    """

    def __init__(self, message, candidates=()):
        super().__init__(message)
        self.candidates = tuple(candidates)


class InsufficientTail(H1FlowError, ValueError):
    pass


class AreaGuard(H1FlowError, ValueError):
    pass


class LeafNotClosedAtOrigin(H1FlowError, ValueError):
    pass


class CouldNotGeneratePositiveArea(H1FlowError, RuntimeError):
    pass


class SymmetryViolated(H1FlowError, ValueError):
    pass


class NotConverged(H1FlowError, RuntimeError):
    pass


class ParseError(H1FlowError, ValueError):
    pass
