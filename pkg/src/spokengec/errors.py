"""Exception types shared across the toolkit.

The command line maps :class:`UsageError` to exit status 1 and
:class:`DataError` to exit status 2.
"""


class SpokenGecError(Exception):
    exit_code = 1


class UsageError(SpokenGecError):
    """Bad arguments, configuration, or parameter values."""

    exit_code = 1


class DataError(SpokenGecError):
    """Malformed or inconsistent input data."""

    exit_code = 2
