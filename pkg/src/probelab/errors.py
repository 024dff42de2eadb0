"""Exception types raised across the package."""


class ProbeLabError(Exception):
    """Base class for all probelab errors."""


class DimensionError(ProbeLabError):
    """Operator dimensions are incompatible or exceed the qubit cap."""


class ValidationError(ProbeLabError):
    """An input fails a structural precondition (hermiticity, trace, ...)."""


class PSDViolationError(ValidationError):
    """A candidate density matrix has a negative eigenvalue beyond tolerance."""

    def __init__(self, min_eigenvalue: float):
        self.min_eigenvalue = float(min_eigenvalue)
        super().__init__(
            f"matrix is not positive semidefinite: smallest eigenvalue "
            f"{self.min_eigenvalue:.3e}"
        )


class SLDInconsistencyError(ProbeLabError):
    """The derivative has support where the state has none, so no symmetric
    logarithmic derivative satisfies the defining equation."""


class UndefinedLambdaError(ProbeLabError):
    """An outcome has vanishing probability but a nonvanishing numerator, so
    its inverse eigenvalue ratio is undefined."""


class SingularOutcomeError(ProbeLabError):
    """A zero-probability outcome carries a nonzero probability derivative,
    making the Fisher sum divergent."""


class DegenerateModelError(ProbeLabError):
    """The outcome distribution carries no information about the parameter."""


class UnsupportedClosedFormError(ProbeLabError):
    """No closed-form solution is known for the requested combination."""


class ConfigError(ProbeLabError):
    """An experiment configuration failed to parse or validate."""
