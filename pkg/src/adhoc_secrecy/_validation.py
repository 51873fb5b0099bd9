"""Exception types and argument checks shared across the package."""

import math


class DomainError(ValueError):
    """An argument lies outside the domain of a formula."""


class InfeasibleError(ValueError):
    """The outage constraints admit no positive secrecy rate."""


class CapabilityError(ValueError):
    """The requested evaluation path is not supported for these arguments."""


def check_finite(name, value):
    if not math.isfinite(value):
        raise DomainError(f"{name} must be finite, got {value!r}")
    return value


def check_positive(name, value):
    check_finite(name, value)
    if value <= 0:
        raise DomainError(f"{name} must be > 0, got {value!r}")
    return value


def check_nonnegative(name, value):
    check_finite(name, value)
    if value < 0:
        raise DomainError(f"{name} must be >= 0, got {value!r}")
    return value


def check_probability(name, value):
    """Open unit interval, as required for outage constraints."""
    check_finite(name, value)
    if not 0.0 < value < 1.0:
        raise DomainError(f"{name} must lie in (0, 1), got {value!r}")
    return value


def check_alpha(alpha):
    check_finite("alpha", alpha)
    if alpha <= 2:
        raise DomainError(f"alpha must exceed 2, got {alpha!r}")
    return float(alpha)


def check_antennas(n, minimum=2):
    if isinstance(n, bool) or int(n) != n:
        raise DomainError(f"n must be an integer, got {n!r}")
    n = int(n)
    if n < minimum:
        raise DomainError(f"n must be >= {minimum}, got {n}")
    return n
