"""Exception hierarchy. Each family maps onto a CLI exit code."""

EXIT_OK = 0
EXIT_GATE_FAILURE = 1
EXIT_CONFIGURATION = 2
EXIT_NUMERICAL = 3


class SteadyEulerError(Exception):
    exit_code = EXIT_NUMERICAL


class ConfigurationError(SteadyEulerError, ValueError):
    """Bad input: config values, broken preconditions, malformed files."""
    exit_code = EXIT_CONFIGURATION


class InvalidIntervalError(ConfigurationError):
    def __init__(self, z0, z1):
        super().__init__("invalid interval: need z0 < z1, got z0=%r, z1=%r" % (z0, z1))
        self.z0 = z0
        self.z1 = z1


class DomainError(ConfigurationError):
    """Thermodynamic function called outside its domain (e.g. negative density)."""


class IngestionError(ConfigurationError):
    """Seed-field file could not be read."""


class NumericalError(SteadyEulerError):
    exit_code = EXIT_NUMERICAL


class QuadratureError(NumericalError):
    def __init__(self, message, estimate, error_bound):
        super().__init__("%s (best estimate %r, error bound %r)" % (message, estimate, error_bound))
        self.estimate = estimate
        self.error_bound = error_bound


class ConstructionError(NumericalError):
    def __init__(self, message, z=None):
        super().__init__(message if z is None else "%s at z=%r" % (message, z))
        self.z = z


class VacuumError(NumericalError):
    def __init__(self, z, rho):
        super().__init__(
            "density left the positive range (rho=%r at z=%r); "
            "the psi / entropy combination does not admit a vacuum-free profile" % (rho, z))
        self.z = z
        self.rho = rho


class AccuracyError(NumericalError):
    def __init__(self, estimate, tolerance, step):
        super().__init__(
            "Richardson error estimate %.3e exceeds tolerance %.3e; try a step of %.3e"
            % (estimate, tolerance, step))
        self.estimate = estimate
        self.tolerance = tolerance
        self.step = step


class ShootingError(NumericalError):
    pass


class BlowUpError(NumericalError):
    def __init__(self, time, cell, reason):
        super().__init__("inadmissible state at t=%.6g in cell %s: %s" % (time, cell, reason))
        self.time = time
        self.cell = cell


class VerificationFailure(SteadyEulerError):
    exit_code = EXIT_GATE_FAILURE
