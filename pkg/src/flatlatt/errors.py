"""Exception types shared across the package."""


class FlatLattError(Exception):
    pass


class PrecisionExhausted(FlatLattError):
    """Interval refinement hit the precision cap without deciding a comparison."""


class NotIrreducible(FlatLattError):
    pass


class InvalidProfile(FlatLattError):
    pass


class InvalidPermutation(FlatLattError, ValueError):
    pass


class NotCommensurable(FlatLattError):
    pass


class InsufficientData(FlatLattError):
    pass


class DegeneratePair(FlatLattError):
    pass


class DomainError(FlatLattError):
    pass


class UnknownName(FlatLattError, KeyError):
    pass


class VerificationFailure(FlatLattError):
    def __init__(self, message, counterexample=None):
        super().__init__(message)
        self.counterexample = counterexample


class GuardRefusal(FlatLattError):
    pass


class BoundViolation(FlatLattError, AssertionError):
    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report
