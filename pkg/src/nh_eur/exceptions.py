"""Custom exceptions for nh_eur."""


class NHEURError(Exception):
    """Base class for all nh_eur errors."""

    pass


class InvalidParameterError(NHEURError, ValueError):
    """Raised when parameters, observables, states or grids break their invariants."""

    pass


class PhaseError(NHEURError):
    """Raised when an operation is used outside the phase it is defined for."""

    pass


class NormalizationError(NHEURError):
    """Raised when an evolved state has decayed too far to be normalized."""

    pass


class DensityMatrixError(NHEURError):
    """Raised when an input is not a valid density matrix."""

    pass


class BoundViolationError(NHEURError):
    """Raised when an EUR value falls below its lower bound."""

    pass


class IntegratorError(NHEURError):
    """Raised when the reference integrator is misconfigured."""

    pass


class ConfigError(NHEURError):
    """Raised when a run configuration cannot be parsed or validated."""

    def __init__(self, message: str, line: int | None = None) -> None:
        self.message = message
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)
