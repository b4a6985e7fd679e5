"""Exception and warning types shared across the package.

Two error families matter to callers: configuration problems (bad inputs,
malformed scenarios) and numerical problems discovered while computing
(non-positive covariances, under-resolved grids, non-finite intermediates).
The command line maps them to exit codes 2 and 1 respectively.
"""


class QdetlimError(Exception):
    """Base class for all package errors."""


class ValidationError(QdetlimError):
    """Invalid configuration or input data."""


class GridError(ValidationError):
    """Invalid time grid or grid mismatch between objects."""


class NumericsError(QdetlimError):
    """A computation produced numerically untrustworthy results."""


class BandwidthWarning(UserWarning):
    """Spectral content has not decayed at the edge of the frequency grid."""
