"""Exception types shared across the package."""


class DekinkError(Exception):
    """Base class for all package-specific errors."""


class InputError(DekinkError, ValueError):
    """A caller violated an operation's precondition or passed bad data."""


class ParseError(DekinkError, ValueError):
    """A document or walk query could not be parsed."""


class ContractibleError(DekinkError):
    """A closed walk reduced to nothing, so it has no rotation class."""


class OrderTwoClassError(DekinkError):
    """The section is undefined on order-two orbifold classes."""


class NotFlippableError(DekinkError):
    """The requested move is not a valid flip of this triangulation."""
