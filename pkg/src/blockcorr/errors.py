"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the domain of the function."""


class ValidationError(ValueError):
    """A configuration failed validation.

    ``problems`` lists one message per offending field.
    """

    def __init__(self, problems):
        if isinstance(problems, str):
            problems = [problems]
        self.problems = list(problems)
        super().__init__("; ".join(self.problems))


class ConvergenceError(ArithmeticError):
    """A numerical solve did not reach its tolerance."""

    def __init__(self, message, residual):
        self.residual = residual
        super().__init__(f"{message} (residual {residual:.3e})")


class UnsupportedConfiguration(ValueError):
    """The requested code path does not cover this configuration."""


class UndefinedCorrelation(ArithmeticError):
    """The correlation coefficient is undefined (zero variance)."""
