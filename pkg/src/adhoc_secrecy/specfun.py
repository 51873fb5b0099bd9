"""Special-function kernels shared by the sectoring and beamforming formulas.

All functions are pure. ``alpha`` is the path-loss exponent (> 2) and ``n``
the transmit antenna count throughout.
"""

import math
from itertools import combinations

import numpy as np

from ._validation import DomainError, check_alpha, check_antennas

# Largest antenna count for which the exact beamforming connection outage is
# evaluated; beyond it the low-outage approximation is used instead.
ZETA_MAX_ANTENNAS = 16


def gamma_fn(x):
    """Gamma function for positive finite ``x``."""
    if not math.isfinite(x) or x <= 0:
        raise DomainError(f"gamma_fn requires a positive finite argument, got {x!r}")
    return math.gamma(x)


def c_alpha_n(alpha, n):
    """Return ``pi * G(n-1+2/alpha) * G(1-2/alpha) / G(n-1)``.

    The shot-noise constant appearing in every Laplace transform of the
    aggregate interference; ``n = 2`` gives ``pi * G(1+d) * G(1-d)``.
    """
    alpha = check_alpha(alpha)
    n = check_antennas(n, minimum=2)
    d = 2.0 / alpha
    # ratio via lgamma keeps n up to a few hundred finite
    return math.pi * math.gamma(1.0 - d) * math.exp(math.lgamma(n - 1 + d) - math.lgamma(n - 1))


def zeta(p, k, alpha):
    """Weighted subset sum used by the exact beamforming connection outage.

    Sums, over every ``(p-k)``-subset ``{l_1 < ... < l_m}`` of ``{1..p-1}``,
    the product of ``l_i - (2/alpha) * (l_i - i + 1)``.  Evaluated by a
    dynamic program over the elements rather than by enumeration.
    """
    alpha = check_alpha(alpha)
    p, k = int(p), int(k)
    if p < 1 or not 1 <= k <= p:
        raise DomainError(f"zeta requires 1 <= k <= p, got p={p}, k={k}")
    return _zeta_row(p, alpha)[p - k]


def _zeta_row(p, alpha):
    # row[m] = sum over m-subsets of {1..p-1}; weight of element l placed at
    # (1-based) position i is l - d*(l - i + 1)
    d = 2.0 / alpha
    row = [1.0] + [0.0] * (p - 1)
    for l in range(1, p):
        for m in range(min(l, p - 1), 0, -1):
            row[m] += row[m - 1] * (l - d * (l - m + 1))
    return row


def zeta_bruteforce(p, k, alpha):
    """Direct subset enumeration of :func:`zeta`, exponential in ``p``."""
    d = 2.0 / alpha
    total = 0.0
    for theta in combinations(range(1, p), p - k):
        prod = 1.0
        for i, l in enumerate(theta, start=1):
            prod *= l - d * (l - i + 1)
        total += prod
    return total


def k_alpha_n(alpha, n):
    """Low-outage slope factor ``1 - (2/a) sum_{p<n} (1/p!) prod_{l<p} (l - 2/a)``."""
    alpha = check_alpha(alpha)
    n = check_antennas(n, minimum=1)
    d = 2.0 / alpha
    total = 0.0
    term = 1.0  # prod_{l=1}^{p-1} (l - d) / p!
    for p in range(1, n):
        if p > 1:
            term *= (p - 1 - d) / p
        total += term
    return 1.0 - d * total


def reg_lower_inc_gamma_int(n, x):
    """Regularized lower incomplete gamma ``P(n, x)`` for integer ``n >= 1``.

    Accepts a scalar or array ``x >= 0``.  Small arguments use the
    positive-term power series, large ones the finite complement
    ``1 - e^-x sum_{k<n} x^k/k!``; neither branch cancels badly.
    """
    n = int(n)
    if n < 1:
        raise DomainError(f"shape must be a positive integer, got {n}")
    xa = np.asarray(x, dtype=float)
    if np.any(np.isnan(xa)) or np.any(xa < 0):
        raise DomainError("reg_lower_inc_gamma_int requires x >= 0")
    out = np.empty_like(xa)
    small = xa < n
    if np.any(small):
        out[small] = _lower_series(n, xa[small])
    big = ~small
    if np.any(big):
        xb = xa[big]
        term = np.exp(-xb)
        tail = term.copy()
        for k in range(1, n):
            term = term * xb / k
            tail += term
        out[big] = 1.0 - tail
    return out if np.ndim(x) else float(out)


def _lower_series(n, x):
    # x^n e^-x / n! * sum_k x^k / ((n+1)...(n+k))
    x = np.asarray(x, dtype=float)
    with np.errstate(divide="ignore"):
        lead = np.exp(n * np.log(x) - x - math.lgamma(n + 1))
    lead = np.where(x == 0, 0.0, lead)
    term = np.ones_like(x)
    acc = np.ones_like(x)
    for k in range(1, 2000):
        term = term * x / (n + k)
        acc += term
        if np.all(term <= 1e-17 * acc):
            break
    return lead * acc
