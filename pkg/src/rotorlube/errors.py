"""Exception types shared across the package."""


class RotorlubeError(Exception):
    """Base class for all package errors."""


class ContactError(RotorlubeError):
    """Journal eccentricity reaches or exceeds the radial clearance."""


class ValidationError(RotorlubeError):
    """Invalid input values or configuration."""

    def __init__(self, message, field=None):
        self.field = field
        if field is not None:
            message = f"{field}: {message}"
        super().__init__(message)


class DivergenceError(RotorlubeError):
    """Iterative solver failed to converge within its iteration budget."""

    def __init__(self, message, residual=None, best=None):
        super().__init__(message)
        self.residual = residual
        self.best = best


class EquilibriumError(RotorlubeError):
    """No static equilibrium found inside the clearance circle."""

    def __init__(self, message, best_eccentricity=None, best_residual=None):
        super().__init__(message)
        self.best_eccentricity = best_eccentricity
        self.best_residual = best_residual


class EvaluationError(RotorlubeError):
    """A full-chain response evaluation failed at a given flowrate pair."""

    def __init__(self, message, flowrates=None):
        super().__init__(message)
        self.flowrates = flowrates


class FbOverflowError(RotorlubeError):
    """Backward amplitude below the noise floor; fb ratio is unreliable."""
