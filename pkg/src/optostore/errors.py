"""Exception hierarchy. Each family maps onto one CLI exit code."""


class OptostoreError(Exception):
    exit_code = 1


class DomainError(OptostoreError, ValueError):
    """An argument lies outside the domain of the operation."""

    exit_code = 3


class ConfigError(OptostoreError, ValueError):
    exit_code = 2


class SimulationError(OptostoreError, RuntimeError):
    exit_code = 3


class IntegrationDiverged(SimulationError):
    def __init__(self, time, message=None):
        self.time = time
        super().__init__(message or f"integration diverged at t = {time:.6e} s")


class FitError(OptostoreError, RuntimeError):
    exit_code = 4


class ShapeError(FitError):
    """Lineshape has no usable half-maximum crossing."""


class NormalizationError(FitError):
    pass
