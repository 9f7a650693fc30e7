"""Exception hierarchy shared by all wrightlab modules."""


class WrightlabError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(WrightlabError):
    """Argument outside the mathematical domain of the operation."""


class PoleError(DomainError):
    """Evaluation requested exactly at a pole of the gamma function."""


class CancellationError(WrightlabError):
    """Series summation lost too many digits; switch evaluation method."""

    def __init__(self, message, est_rel_err=None):
        super().__init__(message)
        self.est_rel_err = est_rel_err


class NonConvergence(WrightlabError):
    """Iteration or series failed to converge within its budget."""


class QuadratureDivergence(NonConvergence):
    """Contour quadrature did not stabilise under node doubling."""


class QuadratureError(NonConvergence):
    """Adaptive quadrature failed to reach the requested tolerance."""


class PoleOnContour(WrightlabError):
    """Integrand pole too close to the discretised contour."""


class ParameterError(WrightlabError):
    """Series parameters make the requested sum undefined."""


class DivergentSeries(WrightlabError):
    """Requested series diverges for the given argument."""


class IllConditioned(WrightlabError):
    """Linear matching system too ill-conditioned to trust."""

    def __init__(self, message, condition_number=None):
        super().__init__(message)
        self.condition_number = condition_number


class AmbiguousRegion(WrightlabError):
    """Argument lies too close to two asymptotic sector boundaries."""


class NonAsymptotic(WrightlabError):
    """First omitted expansion term exceeds the last included one."""


class EvaluationFailure(WrightlabError):
    """Every applicable evaluation strategy failed."""


class NoZerosInRegime(WrightlabError):
    """Requested zeros do not exist for these parameters."""


class NoConvergence(NonConvergence):
    """Root refinement did not converge."""


class GridTooCoarse(WrightlabError):
    """Not enough history points for the requested discrete derivative."""


class StencilError(WrightlabError):
    """Finite-difference stencil would leave the operator's domain."""


class ParameterWindow(DomainError):
    """Parameters outside the validity window of a solution family."""
