"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument is outside an operation's documented domain."""


class NoOrderError(DomainError):
    """The base shares a factor with the modulus, so no power of it is 1."""


class ResourceError(RuntimeError):
    """A desk-scale resource guard (memory or runtime cap) would be exceeded."""


class ContractError(RuntimeError):
    """A precondition that callers must uphold was violated."""
