"""Exception hierarchy shared by all modules.

Parameter errors derive from ``ParameterError`` (a ``ValueError``) and map to
CLI exit code 2; numerical failures derive from ``NumericalError`` and map to
exit code 1.
"""


class StableSteinError(Exception):
    """Base class for every error raised by the package."""


class ParameterError(StableSteinError, ValueError):
    """Invalid user-supplied parameter."""


class NumericalError(StableSteinError, ArithmeticError):
    """A numerical routine failed to reach its target accuracy."""


# quad
class InvalidInterval(ParameterError):
    pass


class NonConvergent(NumericalError):
    def __init__(self, message, result=None):
        super().__init__(message)
        self.result = result


class NonFiniteEvaluation(NumericalError):
    pass


class EnvelopeViolated(NumericalError):
    pass


# stable
class OutOfRangeAlpha(ParameterError):
    pass


class OutOfRangeBeta(ParameterError):
    pass


class NonPositiveSigma(ParameterError):
    pass


class NonPositiveA(ParameterError):
    pass


class TableMismatch(ParameterError):
    pass


class TableFormatError(ParameterError):
    pass


# stein
class InvalidTestFunction(ParameterError):
    pass


class NonPositiveScale(ParameterError):
    pass


class LipschitzBoundMissing(ParameterError):
    pass


# domains
class UnknownFamily(ParameterError):
    pass


class InvalidFamilyParams(ParameterError):
    pass


class InversionFailure(NumericalError):
    pass


class NoConvergence(NumericalError):
    pass


# bounds
class PreconditionViolated(ParameterError):
    def __init__(self, message, n_min=None):
        super().__init__(message)
        self.n_min = n_min


class NotUltimatelyMonotone(ParameterError):
    pass


# bench
class InvalidPlan(ParameterError):
    pass


class EmptySample(ParameterError):
    pass


class InsufficientPoints(ParameterError):
    pass
