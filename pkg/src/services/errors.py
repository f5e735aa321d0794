"""
Exceptions raised by the estimation services.

Routes translate them to ``HTTPException``, the CLI to a diagnostic and exit status 2.
"""


class TailFitError(Exception):
    """
    Base class for every error raised by the package
    """


class TailDomainError(TailFitError, ValueError):
    """
    Input outside the mathematical domain of an operation (negative index,
    point outside a law's support, non-positive observation)
    """


class ArgumentError(TailFitError, ValueError):
    """
    Argument out of its admissible range (order statistic index, threshold order,
    mismatched sizes, empty input)
    """


class ConfigurationError(TailFitError):
    """
    Procedure parameters that cannot be used for the given sample size,
    or unknown law / experiment names
    """


class NumericError(TailFitError, ArithmeticError):
    """
    Quadrature or root finding did not reach the requested tolerance

    Args:
        message (str): Human readable description
        residual (float): Error estimate reported by the numerical routine
        detail (str): Extra diagnostic from the routine, if any
    """

    def __init__(self, message: str, residual: float = float("nan"), detail: str = ""):
        super().__init__(message)
        self.residual = residual
        self.detail = detail

    def __str__(self) -> str:
        text = super().__str__()
        return f"{text} (residual={self.residual:.3g}{', ' + self.detail if self.detail else ''})"
