"""Exception types shared across the package."""


class DimensionError(ValueError):
    """Operands disagree in length, modulus or register shape."""


class LayoutError(DimensionError):
    """A register does not have the dimension an operation needs."""


class DomainError(ValueError):
    """An argument lies outside the domain an operation is defined on."""


class PreconditionError(ValueError):
    """The database contents or code violate an algorithm's precondition."""


class ResourceError(RuntimeError):
    """The requested instance exceeds the simulator caps."""


class InvariantViolation(RuntimeError):
    """A state or result broke an invariant that should always hold."""


class SearchFailure(RuntimeError):
    """A randomized search ran out of attempts."""
