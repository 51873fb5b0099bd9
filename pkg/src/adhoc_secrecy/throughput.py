"""Secrecy transmission capacity and the scalar optimizer used for the power split."""

import math
from dataclasses import dataclass

import numpy as np

from ._validation import DomainError, check_nonnegative, check_positive

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0

# Open bracket used for every optimization over the power split.
PHI_LO = 1e-9
PHI_HI = 1.0 - 1e-9


@dataclass(frozen=True)
class RateTriple:
    """Codeword rate, secrecy rate and rate redundancy in bits per channel use."""

    r_b: float
    r_e: float

    def __post_init__(self):
        check_nonnegative("r_b", self.r_b)
        check_nonnegative("r_e", self.r_e)

    @property
    def r_s(self):
        return max(0.0, self.r_b - self.r_e)


def rate_from_threshold(beta):
    check_positive("beta", beta)
    return math.log2(1.0 + beta)


def threshold_from_rate(rate):
    check_nonnegative("rate", rate)
    return math.expm1(rate * math.log(2.0))


def stc(lambda_l, sigma, rates):
    """Secrecy transmission capacity ``(1 - sigma) * lambda_l * [r_b - r_e]^+``."""
    return (1.0 - sigma) * lambda_l * rates.r_s


def golden_section_max(objective, lo, hi, abs_tol=1e-9, max_iter=500):
    """Maximize a unimodal function on ``[lo, hi]``; ties move the bracket left."""
    a, b = lo, hi
    c = b - INV_PHI * (b - a)
    d = a + INV_PHI * (b - a)
    fc, fd = _eval(objective, c), _eval(objective, d)
    for _ in range(max_iter):
        if b - a <= abs_tol:
            break
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - INV_PHI * (b - a)
            fc = _eval(objective, c)
        else:
            a, c, fc = c, d, fd
            d = a + INV_PHI * (b - a)
            fd = _eval(objective, d)
    x = 0.5 * (a + b)
    fx = _eval(objective, x)
    # the midpoint can lose to an interior probe when the objective is flat-topped
    best = max((fx, -x, x), (fc, -c, c), (fd, -d, d))
    return best[2], best[0]


def maximize_scalar(objective, unimodal=True, abs_tol=1e-9, lo=PHI_LO, hi=PHI_HI, n_scan=512):
    """Maximize ``objective`` over ``(lo, hi)``.

    With ``unimodal`` the whole bracket is searched by golden section.
    Otherwise ``n_scan`` equally spaced points are scanned and golden section
    refines the cell pair around the best one.  Ties resolve to the smallest
    argument.  Returns ``(arg, value)``.
    """
    if unimodal:
        return golden_section_max(objective, lo, hi, abs_tol)
    grid = np.linspace(lo, hi, n_scan)
    values = np.array([_eval(objective, float(x)) for x in grid])
    i = int(np.argmax(values))
    a = grid[max(i - 1, 0)]
    b = grid[min(i + 1, n_scan - 1)]
    x, fx = golden_section_max(objective, float(a), float(b), abs_tol)
    if fx > values[i]:
        return x, fx
    return float(grid[i]), float(values[i])


def _eval(objective, x):
    value = float(objective(x))
    if not math.isfinite(value):
        raise DomainError(f"objective returned non-finite value {value!r} at {x!r}")
    return value
