"""Exception hierarchy shared by all mubkit modules."""


class MubkitError(Exception):
    """Base class for every error raised by mubkit."""


class InvalidDimension(MubkitError, ValueError):
    pass


class InvalidCharacteristic(MubkitError, ValueError):
    pass


class TooLarge(MubkitError, ValueError):
    pass


class NotPrimePower(MubkitError, ValueError):
    """A Galois construction was requested for a dimension that is not p**m."""


class NoInverse(MubkitError, ArithmeticError):
    pass


class LabelRangeError(MubkitError, IndexError):
    pass


class ShapeError(MubkitError, ValueError):
    pass


class DomainError(MubkitError, ValueError):
    pass


class NumericalDegeneracy(MubkitError, RuntimeError):
    pass


class InvariantViolation(MubkitError, AssertionError):
    """A relation that must hold by construction was found not to hold."""


class DegenerateProjection(MubkitError, ValueError):
    pass


class InconsistentData(MubkitError, ValueError):
    pass


class IncompleteData(MubkitError, ValueError):
    pass
