"""Exception types shared across the package."""


class ValidationError(ValueError):
    """An input violates a documented precondition (bad shape, range, or config)."""


class NumericalError(ArithmeticError):
    """A computation cannot proceed (singular information matrix, vanishing posterior)."""
