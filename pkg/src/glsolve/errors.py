"""Exception hierarchy shared across the package.

The CLI maps these onto exit codes: usage errors exit 1, data errors
exit 2, size-guard refusals exit 3.
"""


class GlsError(Exception):
    """Base class for all errors raised by this package."""


class UsageError(GlsError):
    """Invalid flag combination or out-of-range parameter."""


class DataError(GlsError):
    """Malformed or inconsistent input data (edge lists, trees, labels)."""


class SizeGuardError(GlsError):
    """Instance exceeds the hard limits of a brute-force oracle."""


class ConvergenceError(GlsError):
    """Iterative eigensolver failed to reach the requested residual."""


class PartitionerError(GlsError):
    """External partitioner command failed or produced invalid output."""
