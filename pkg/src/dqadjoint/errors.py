"""Exception hierarchy shared by every layer of the package."""


class DQError(Exception):
    """Base class for all errors raised by dqadjoint."""


class DivisionByNonAppreciable(DQError, ZeroDivisionError):
    pass


class ZeroQuaternion(DQError, ZeroDivisionError):
    pass


class NonAppreciable(DQError, ZeroDivisionError):
    pass


class ZeroInput(DQError, ValueError):
    pass


class ZeroVector(DQError, ValueError):
    pass


class DimensionMismatch(DQError, ValueError):
    pass


class NotSquare(DQError, ValueError):
    pass


class NotAdjointStructured(DQError, ValueError):
    pass


class OddLength(DQError, ValueError):
    pass


class NotHermitian(DQError, ValueError):
    pass


class EmptyInput(DQError, ValueError):
    pass


class BadRank(DQError, ValueError):
    pass


class ConvergenceFailure(DQError, RuntimeError):
    pass


class DegenerateCluster(DQError, RuntimeError):
    pass


class MultiplicityMismatch(DQError, RuntimeError):
    pass


class SpectralGapViolation(DQError, ValueError):
    pass


class ZeroDominant(DQError, ValueError):
    pass


class NoConvergence(DQError, RuntimeError):
    """Iteration limit reached before the residual test passed.

    ``last`` holds the final iterate (an eigenpair-like object), ``residual``
    its residual and ``partial`` any results gathered before the failure.
    """

    def __init__(self, message, *, last=None, residual=None, partial=None, stage=None):
        super().__init__(message)
        self.last = last
        self.residual = residual
        self.partial = partial
        self.stage = stage


class InfeasibleCount(DQError, ValueError):
    pass


class NonUnitEntry(DQError, ValueError):
    pass


class CalibrationFailure(DQError, RuntimeError):
    pass


class LengthMismatch(DQError, ValueError):
    pass


class NoGroundTruth(DQError, ValueError):
    pass


class FormatError(DQError, ValueError):
    """Malformed text file; ``lineno`` is 1-based."""

    def __init__(self, message, lineno=None):
        if lineno is not None:
            message = f"line {lineno}: {message}"
        super().__init__(message)
        self.lineno = lineno
