"""Exception types shared across the package."""


class PlasmaResponseError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(PlasmaResponseError, ValueError):
    """An argument lies outside the domain of a statistical kernel."""


class ParameterError(PlasmaResponseError, ValueError):
    """A parameter set violates one of its invariants (e.g. ``y <= 0``)."""


class NumericalError(PlasmaResponseError, ArithmeticError):
    """An integral failed to converge.

    The offending :class:`~plasma_response.quadrature.QuadratureResult` is
    kept on ``result`` and the name of the term on ``term``.
    """

    def __init__(self, term, result=None):
        self.term = term
        self.result = result
        msg = f"{term}: quadrature did not converge"
        if result is not None:
            msg += (f" (value={result.value!r}, error estimate="
                    f"{result.error_estimate:.3g}, evaluations={result.evaluations})")
        super().__init__(msg)
