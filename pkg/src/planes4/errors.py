"""Toolkit-wide exception types, mapped to CLI exit codes."""


class ConfigError(ValueError):
    """Invalid user configuration (bad flag value, malformed file). Exit code 1."""


class NumericalError(RuntimeError):
    """A numerical routine failed or an input violated a numeric contract. Exit code 2."""
