"""Exception types shared across the toolkit."""


class CfCalibError(Exception):
    """Base class for all toolkit errors; carries a machine-readable code."""

    code = "error"


class DomainError(CfCalibError):
    """Input outside the documented domain (bad coordinates, units, state)."""

    code = "domain"


class InsufficientDataError(CfCalibError):
    """Too few samples for the requested computation."""

    code = "insufficient-data"


class OrderingError(CfCalibError):
    """Timestamps not strictly increasing."""

    code = "ordering"


class PairingError(CfCalibError):
    """Leader/follower logs have no usable temporal overlap."""

    code = "pairing"


class NoCarFollowingError(CfCalibError):
    """Cleaning removed every sample; no car-following interval found."""

    code = "no-car-following"


class SplitError(CfCalibError):
    """Calibration/validation split cannot be formed."""

    code = "split"


class ConfigError(CfCalibError):
    """Invalid configuration (bounds, rates, step sizes)."""

    code = "config"


class UndefinedStatisticError(CfCalibError):
    """Statistic undefined for this input (zero mean, zero variance, ...)."""

    code = "undefined-statistic"
