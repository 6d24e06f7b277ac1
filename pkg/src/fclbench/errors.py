"""Exception types shared across the package.

Invalid arguments raise plain ``ValueError``; the classes here mark failure
modes a caller may want to catch and handle separately.
"""


class GenerationError(RuntimeError):
    """Instance generation exhausted its retry budget."""


class ResourceLimitError(RuntimeError):
    """Problem exceeds a configured size limit (DP width, brute-force count)."""


class UndefinedMetricError(RuntimeError):
    """A metric is undefined for the given inputs (e.g. no ground-state samples)."""


class DegenerateSeriesError(RuntimeError):
    """A time series is constant, so its autocorrelation is undefined."""


class InstanceFormatError(ValueError):
    """An instance or manifest file is malformed or has the wrong version."""
