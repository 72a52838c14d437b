"""Exception types shared across the package."""


class ParameterError(ValueError):
    """An argument is outside the domain the operation accepts."""


class GenerationError(RuntimeError):
    """A random generator ran out of retries."""


class CapacityError(RuntimeError):
    """The instance is too large for the requested method."""


class ContractError(ValueError):
    """An input violates a numerical precondition (e.g. symmetry)."""


class GraphParseError(ValueError):
    def __init__(self, message, lineno=None):
        self.lineno = lineno
        if lineno is not None:
            message = f"line {lineno}: {message}"
        super().__init__(message)
