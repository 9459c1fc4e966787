"""Exception hierarchy. Each CLI exit code maps to one branch."""


class MonofourierError(Exception):
    """Base class for library errors."""


class DomainError(MonofourierError, ValueError):
    """Argument outside the mathematical domain of an operation."""


class CapacityError(MonofourierError, ValueError):
    """Request exceeds a hard size limit (dimension, spectral-set size, ...)."""


class ConfigError(MonofourierError, ValueError):
    """Invalid estimator or experiment configuration."""


class InfeasibleError(MonofourierError, ValueError):
    """A lower-bound construction cannot be built with the given parameters."""


class PartialCodeError(InfeasibleError):
    """Greedy packing ran out of retries; ``words`` holds what was found."""

    def __init__(self, message, words):
        super().__init__(message)
        self.words = tuple(words)
