class LRAStarError(Exception):
    """Base class for errors raised by this package."""


class ContractError(LRAStarError, ValueError):
    """An argument violates a documented precondition or invariant."""


class ConfigError(LRAStarError, ValueError):
    """Inconsistent search or experiment configuration."""


class GenerationError(LRAStarError, RuntimeError):
    """An environment could not be generated with the requested parameters."""


class ConsistencyError(LRAStarError, AssertionError):
    """A cross-run check (equal costs, monotone evaluation counts) failed."""
