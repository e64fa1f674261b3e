"""Exception types raised across the package."""


class ValidationError(ValueError):
    """Input violates a documented precondition."""


class PreconditionError(ValidationError):
    """Operation applied to an object outside its domain (e.g. a non-unital channel)."""


class ResourceLimitError(ValidationError):
    """Requested size exceeds a configured cap."""
