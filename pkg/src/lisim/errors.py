"""Shared exception types.

ConfigError covers parameter and configuration problems (CLI exit code 2),
PreconditionError covers operation preconditions such as pilot-length or
domain violations (CLI exit code 3).
"""


class ConfigError(ValueError):
    """Invalid configuration value or unparseable config input."""


class PreconditionError(ValueError):
    """An operation was called outside its stated preconditions."""
