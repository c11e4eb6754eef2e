"""Shared exception types.

Budgeted enumerations raise ResourceLimitError instead of silently
truncating; fast paths that cannot serve a query raise a typed error so
callers can route to the slow path explicitly.
"""


class ResourceLimitError(RuntimeError):
    """An enumeration or search would exceed its operation budget."""


class ContentDivisibleError(ValueError):
    """Prime-counting fast path refused: the prime divides the form content."""


class IndexDivisorError(ValueError):
    """Splitting data requested at a prime dividing the order index."""


class ConfigError(ValueError):
    """Invalid experiment configuration (CLI exit code 2)."""
