"""Exception types. The CLI maps each family onto an exit code."""


class ValidationError(ValueError):
    """Bad user input: model parameters, config values, mismatched sizes."""


class DimensionError(ValidationError):
    """Requested Hilbert space is outside the supported dense range."""


class ConvergenceError(RuntimeError):
    """An iterative numerical routine did not reach its tolerance."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class MissingInputError(FileNotFoundError):
    """A pipeline stage needs output from an earlier stage that is absent."""
