"""Exception hierarchy shared by every module of the package."""


class GepError(Exception):
    """Base class for all errors raised by gepdist."""


class ParameterDomainError(GepError, ValueError):
    """A distribution parameter is non-positive or non-finite."""


class DomainError(GepError, ValueError):
    """An argument lies outside the domain of the operation."""


class TailOverflowError(DomainError):
    """A quantile request is so close to 1 that the result is not representable."""


class TailUnderflowError(DomainError):
    """The survival function underflowed, so the hazard cannot be formed."""

    def __init__(self, x, message=None):
        self.x = x
        super().__init__(message or f"survival function underflows at x={x!r}")


class SeriesTruncationError(GepError, ArithmeticError):
    """An infinite series did not converge under the active SeriesControl."""

    def __init__(self, message, partial_sum=None, last_term=None, terms=None):
        self.partial_sum = partial_sum
        self.last_term = last_term
        self.terms = terms
        super().__init__(message)


class QuadratureError(GepError, ArithmeticError):
    """Adaptive integration failed to reach the requested accuracy."""

    def __init__(self, message, estimate=None, error_estimate=None, u=None):
        self.estimate = estimate
        self.error_estimate = error_estimate
        self.u = u
        super().__init__(message)


class ValidationError(GepError):
    """A series result disagrees with its quadrature oracle."""

    def __init__(self, message, series_value=None, oracle_value=None):
        self.series_value = series_value
        self.oracle_value = oracle_value
        super().__init__(message)


class OptimizationError(GepError):
    """No start of a likelihood maximization converged."""

    def __init__(self, message, best=None, diagnostics=None):
        self.best = best
        self.diagnostics = diagnostics or {}
        super().__init__(message)


class IntervalUnavailableError(GepError):
    """A Wald interval cannot be formed because the covariance is unusable."""


class DataError(GepError, ValueError):
    """Input data could not be read or contains invalid values."""

    def __init__(self, message, line=None, content=None):
        self.line = line
        self.content = content
        super().__init__(message)
