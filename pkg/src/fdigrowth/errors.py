"""Exception types shared across the library."""


class DomainError(ValueError):
    """An input violates a documented precondition or model assumption."""


class PreconditionError(ValueError):
    """An operation was called outside the parameter region where it is defined."""


class NumericalError(RuntimeError):
    """A numerical routine failed to bracket, converge, or stay finite."""


class ConfigError(ValueError):
    """A scenario configuration file is malformed."""
