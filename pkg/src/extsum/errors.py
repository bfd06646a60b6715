"""Error types mapped to CLI exit codes (config=2, data=3, numeric=4)."""


class ExtsumError(Exception):
    """Base class for errors the CLI reports without a traceback."""

    exit_code = 1


class ConfigError(ExtsumError):
    """Bad flags, config files, or option combinations."""

    exit_code = 2


class DataError(ExtsumError):
    """Missing or malformed input files and corpus content."""

    exit_code = 3


class NumericError(ExtsumError):
    """Non-finite losses or gradients during training."""

    exit_code = 4
