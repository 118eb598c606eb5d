"""Exception hierarchy shared across the package.

Exit codes follow the CLI contract: 1 for validation/generation failures,
2 for configuration and I/O problems.
"""


class ShoptalkError(Exception):
    exit_code = 1


class ValidationError(ShoptalkError):
    """Input data violates an invariant. Carries structured details."""

    exit_code = 1

    def __init__(self, message, details=None):
        super().__init__(message)
        self.details = details if details is not None else []


class GenerationError(ShoptalkError):
    """A generator could not satisfy its constraints (e.g. unsatisfiable slot)."""

    exit_code = 1


class NotFoundError(ValidationError):
    exit_code = 1


class ConfigError(ShoptalkError):
    exit_code = 2


class StorageError(ShoptalkError):
    exit_code = 2
