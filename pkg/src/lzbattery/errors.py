"""Exception types shared across the package."""


class IntegrityError(ValueError):
    """An object violates a physical or structural invariant (e.g. Hermiticity)."""


class NumericError(ArithmeticError):
    """A numerical routine failed to produce a trustworthy result."""
