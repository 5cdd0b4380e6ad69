"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the domain of an operation."""


class EvaluationError(ArithmeticError):
    """An objective returned a non-finite value.

    The offending abscissa is kept on ``abscissa``.
    """

    def __init__(self, message, abscissa=None):
        super().__init__(message)
        self.abscissa = abscissa


class BracketError(ValueError):
    """A root bracket has no sign change."""


class ConvergenceError(RuntimeError):
    """An iterative routine exhausted its budget."""


class NumericalError(ArithmeticError):
    """Quadrature failed to reach its tolerance.

    ``diagnostics`` carries whatever the integrator reported.
    """

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}
