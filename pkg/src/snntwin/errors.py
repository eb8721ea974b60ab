"""Exception hierarchy shared by every module."""


class DomainError(ValueError):
    """An argument lies outside the domain of the operation."""


class OutOfPremiseError(DomainError):
    """Inputs violate the non-negative, sub-threshold drive the closed forms assume."""


class InfeasibleScenarioError(DomainError):
    """A spike-rate scenario maps to a sparsity outside [0, 1]."""

    def __init__(self, message, bound=None):
        super().__init__(message)
        self.bound = bound


class ConfigurationError(LookupError):
    """A hardware profile or workload file is missing something needed for evaluation."""
