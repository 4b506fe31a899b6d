"""Exception hierarchy shared by the library and the CLI."""


class SchrodError(Exception):
    """Base class for all library errors."""


class ParameterError(SchrodError, ValueError):
    """Invalid argument or inconsistent shapes."""


class ConfigError(ParameterError):
    """Malformed run configuration."""

    def __init__(self, message, lineno=None):
        self.lineno = lineno
        if lineno is not None:
            message = f"line {lineno}: {message}"
        super().__init__(message)


class CapabilityError(SchrodError):
    """Request exceeds what the implementation or machine can do."""


class NumericalError(SchrodError, ArithmeticError):
    """A numerical algorithm failed or degraded."""


class SingularShiftError(NumericalError):
    pass


class ShiftError(NumericalError):
    pass


class DivergenceError(NumericalError):
    pass


class BreakdownError(NumericalError):
    def __init__(self, message, iteration):
        self.iteration = iteration
        super().__init__(f"{message} (iteration {iteration})")
