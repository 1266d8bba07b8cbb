"""
Error hierarchy shared by the numerical services and the CLI.

Services raise; only the CLI turns errors into exit codes.
"""


class SuperfracError(Exception):
    """Root of all superfrac errors."""


class DomainError(SuperfracError, ValueError):
    """Argument outside the mathematical domain of an operation."""


class PoleError(DomainError):
    """Gamma function evaluated at a nonpositive integer."""
    def __init__(self, arg):
        self.arg = arg
        super().__init__(f"Gamma has a pole at {arg!r}")


class DegreeLimitError(DomainError):
    """Shifted-power expansion requested above the conditioning guard."""
    def __init__(self, degree, limit):
        self.degree = degree
        self.limit = limit
        super().__init__(f"Degree {degree} exceeds the shifted-power limit {limit}")


class SideMismatchError(DomainError):
    """Polynomial anchor does not match the side of the fractional operator."""


class UnsupportedPairingError(DomainError):
    """No closed form exists for this (node family, side) pair."""


class SingularEvaluationError(DomainError):
    """Evaluation at, or too close to, a singular anchor endpoint."""


class IllConditionedSystemError(SuperfracError):
    """Galerkin system is singular or too ill-conditioned to trust."""
    def __init__(self, condition, limit):
        self.condition = condition
        self.limit = limit
        super().__init__(
            f"Galerkin system ill-conditioned: cond={condition:.3e} exceeds {limit:.1e}"
        )


class ConfigError(SuperfracError):
    """Invalid command-line or experiment configuration."""


class ValidationFailure(SuperfracError):
    """One or more validation suites failed."""
    def __init__(self, failed_suites):
        self.failed_suites = list(failed_suites)
        super().__init__(f"Validation failed: {', '.join(self.failed_suites)}")
