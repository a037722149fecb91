"""Exception and warning types shared across the package."""


class DtcSenseError(Exception):
    """Base class for all package-specific errors."""


class ConfigError(DtcSenseError):
    """Invalid configuration value or malformed config file."""


class ResourceLimitError(DtcSenseError):
    """Requested run exceeds the dense-simulation resource gates."""


class NumericalError(DtcSenseError):
    """A numerical contract was violated (positivity loss, non-convergence, ...)."""


class BoundaryPeakWarning(UserWarning):
    """Transition search found its maximum on the grid boundary (grid too narrow)."""
