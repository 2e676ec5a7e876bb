"""Exception types shared across the package."""


class TreecalError(Exception):
    """Base class for all package errors."""


class ConfigError(TreecalError, ValueError):
    """Invalid run parameters (bad H/L/T/S combination, unknown tag, ...)."""


class DomainError(TreecalError, ValueError):
    """A point is not a member of the expected domain, or an empty input."""


class BoundsError(TreecalError, ValueError):
    """Round index or digit outside the valid range."""


class ProtocolError(TreecalError, RuntimeError):
    """Out-of-order forecast/observe calls or misuse of a clairvoyant mode."""


class UnsupportedCombination(TreecalError, ValueError):
    """Operation not defined for this (domain, norm) or regularizer pairing."""
