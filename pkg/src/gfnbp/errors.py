"""Exception hierarchy shared by every layer of the package."""


class GfnbpError(Exception):
    """Base class for all package errors."""


class DomainError(GfnbpError, ValueError):
    """An argument lies outside the mathematical domain of the operation."""


class NumericalError(GfnbpError, ArithmeticError):
    """A numerical procedure could not produce a trustworthy value."""

    def __init__(self, message, operation=None):
        super().__init__(message)
        self.operation = operation


class NonConvergent(NumericalError):
    pass


class Overflow(NumericalError):
    pass


class DivergentSeries(NumericalError):
    pass


class NumeratorPole(NumericalError):
    pass


class CancellationLoss(NumericalError):
    pass


class MomentDiverges(NumericalError):
    pass


class SeriesWindowEmpty(NumericalError):
    pass


class QuadratureFail(NumericalError):
    pass


class ResolutionTooCoarse(NumericalError):
    pass


class GridMiss(GfnbpError, KeyError):
    """A requested time is not a node of the ensemble grid."""


class DegenerateCorrelation(GfnbpError):
    pass
