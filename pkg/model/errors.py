"""
Error types shared by every PhantomLab module.
"""


class PhantomLabError(Exception):
    """Base class. `context` carries the structured details reported by the CLI."""

    def __init__(self, message: str, **context):
        super().__init__(message)
        self.context = context

    def report(self) -> str:
        if not self.context:
            return str(self)
        details = ", ".join(f"{key}={value}" for key, value in self.context.items())
        return f"{self} ({details})"


class ParameterError(PhantomLabError, ValueError):
    """Invalid model or run parameter (n, k, d, j, p, t, epsilon, regime...)."""


class DomainError(PhantomLabError, ValueError):
    """Argument outside the domain of a special function, e.g. theta nome q >= 1."""


class ResourceLimitError(PhantomLabError):
    """A configured size guard was hit (rational bit size, state vector, series terms)."""


class ConvergenceError(PhantomLabError):
    """Iterative eigensolver did not converge."""


class PrecisionError(PhantomLabError):
    """Requested perturbation is not representable at the configured mantissa width."""
