"""Exception hierarchy shared across the package.

The CLI maps these onto exit codes: configuration problems exit 1,
data problems exit 2.
"""


class ValirankError(Exception):
    """Base class for all package errors."""


class ConfigurationError(ValirankError):
    """Invalid configuration: bad flag values, empty grids, k < 1, etc."""


class DataError(ValirankError):
    """Invalid or inconsistent data: parse failures, universe mismatches."""


class DegenerateInputError(DataError):
    """An instance whose initial error is zero, for which error-reduction
    measures are undefined."""


class ProtocolError(ValirankError):
    """Out-of-order interaction with a validation session."""
