"""Exception types shared by the package."""


class InvalidInput(ValueError):
    """Input violates a documented precondition."""


class ResourceError(RuntimeError):
    """A configured size cap would be exceeded."""

    def __init__(self, message, cap=None):
        super().__init__(message)
        self.cap = cap


class InvalidState(RuntimeError):
    """Operation called before its prerequisite analysis succeeded."""


class ConsistencyError(AssertionError):
    """An internal invariant failed. This indicates a bug."""
