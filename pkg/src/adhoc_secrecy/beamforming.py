"""Artificial-noise-aided beamforming: outage probabilities and secrecy capacity.

Each transmitter beams its message along the intended channel with power
``P_I`` and spreads artificial noise of total power ``P_A`` uniformly over the
``n - 1`` dimensional null space of that channel.

Functions whose names end in ``_approx``, plus :func:`rb_approx`,
:func:`re_from_epsilon` and :func:`capacity_approx`, return low-outage
approximations rather than exact values; see :data:`APPROXIMATIONS`.
"""

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate, optimize

from ._validation import (
    CapabilityError,
    DomainError,
    InfeasibleError,
    check_antennas,
    check_positive,
    check_probability,
)
from .model import PowerSplit
from .specfun import ZETA_MAX_ANTENNAS, _zeta_row, c_alpha_n, k_alpha_n, reg_lower_inc_gamma_int
from .throughput import RateTriple, maximize_scalar, stc

# Within this distance of phi = 1/n the equal-split (gamma) branch is used.  The
# series form stays accurate right up to 1/n, so the switch only has to catch
# splits that are 1/n up to rounding; a wider snap costs about n^2 |phi - 1/n|.
EQUAL_SPLIT_TOL = 1e-12

APPROXIMATIONS = frozenset(
    {"connection_outage_approx", "secrecy_outage_lead", "rb_approx", "re_from_epsilon", "capacity_approx"}
)

BETA_BRACKET = (1e-9, 1e9)


@dataclass(frozen=True)
class InterferencePdfSpec:
    """Interference power ``P_x`` seen by an unintended single-antenna receiver."""

    phi: float
    p_total: float
    n: int
    equal_split: bool = field(init=False)

    def __post_init__(self):
        check_antennas(self.n, minimum=2)
        PowerSplit(self.phi, self.p_total)
        object.__setattr__(self, "equal_split", abs(self.phi - 1.0 / self.n) < EQUAL_SPLIT_TOL)

    @classmethod
    def from_params(cls, params, split):
        return cls(split.phi, split.p_total, params.n)

    @property
    def p_i(self):
        return self.p_total * self.phi

    @property
    def p_a(self):
        return self.p_total - self.p_i

    @property
    def noise_var(self):
        """Per-dimension artificial-noise power ``P_A / (n - 1)``."""
        return self.p_a / (self.n - 1)


# ---------------------------------------------------------------------------
# interference power at an unintended receiver


def interference_pdf(spec, z):
    """Density of ``P_x`` at ``z > 0`` (scalar or array).

    ``P_x = P_I * E + P_A/(n-1) * G`` with ``E ~ Exp(1)`` and
    ``G ~ Gamma(n-1, 1)`` independent.  Away from ``phi = 1/n`` the density
    is written as ``(1/P_I) (z/s)^a e^(-z/s) S(cz)`` with ``s`` the noise
    variance, ``a = n - 1`` and ``S(x) = sum_k x^k / (a+k)!``, which stays
    free of cancellation on both sides of the equal-split point.
    """
    za = np.asarray(z, dtype=float)
    if np.any(~(za > 0)):
        raise DomainError("interference_pdf requires z > 0")
    vals = np.array([_pdf_scalar(spec, float(v)) for v in za.ravel()]).reshape(za.shape)
    return vals if np.ndim(z) else float(vals)


def _pdf_scalar(spec, z):
    p_i, s, a = spec.p_i, spec.noise_var, spec.n - 1
    if spec.equal_split:
        n = spec.n
        return math.exp((n - 1) * math.log(z) - z / p_i - math.lgamma(n) - n * math.log(p_i))
    if s == 0.0:
        return math.exp(-z / p_i) / p_i
    c = 1.0 / s - 1.0 / p_i
    x = c * z
    if x >= 1.0:
        q = 1.0 - s / p_i
        return math.exp(-a * math.log(q) - z / p_i) * reg_lower_inc_gamma_int(a, x) / p_i
    lead = math.exp(a * math.log(z / s) - z / s - math.lgamma(a + 1))
    if x >= 0.0:
        term, acc = 1.0, 1.0
        k = 0
        while term > 1e-17 * acc:
            k += 1
            term *= x / (a + k)
            acc += term
        return lead * acc / p_i
    return lead * _poisson_weighted(-x, a) / p_i


def _poisson_weighted(y, a):
    # sum_k Poisson(k; y) * a / (a + k); e^-y S(-y) up to the factor 1/a!
    width = 12.0 * math.sqrt(y) + 40.0
    k = np.arange(max(0, int(y - width)), int(y + width) + 1, dtype=float)
    logp = k * math.log(y) - y - np.array([math.lgamma(v + 1.0) for v in k])
    return float(np.sum(np.exp(logp) * a / (a + k)))


def interference_cdf(spec, z):
    """CDF of ``P_x`` by adaptive quadrature of :func:`interference_pdf`."""
    if z <= 0:
        return 0.0
    val, _ = integrate.quad(lambda t: _pdf_scalar(spec, t), 0.0, z, limit=200, epsabs=1e-13, epsrel=1e-12)
    return min(1.0, val)


def fractional_moment(spec, alpha):
    """``E[P_x^(2/alpha)]``."""
    delta = 2.0 / check_positive("alpha", alpha)
    rho = spec.noise_var / spec.p_i
    return spec.p_i**delta * _moment_ratio(spec.n, rho, delta, spec.equal_split)


def _moment_ratio(n, rho, delta, equal_split=False):
    """``E[P_x^d] / P_I^d`` where ``rho`` is the noise-to-information variance ratio."""
    a = n - 1
    if equal_split:
        return math.exp(math.lgamma(n + delta) - math.lgamma(n))
    if rho == 0.0:
        return math.gamma(1.0 + delta)
    q = 1.0 - rho
    if abs(q) < 1.0 and abs(q) ** a < 1e-2:
        # the direct form cancels here; sum its tail instead
        term = math.exp(math.lgamma(a + 1 + delta) - math.lgamma(a + 1))
        terms = [term]
        j = 0
        while abs(term) > 1e-17 * abs(terms[0]) and j < 100000:
            term *= q * (j + a + 1 + delta) / (j + a + 1)
            terms.append(term)
            j += 1
        return rho ** (1.0 + delta) * math.fsum(terms)
    # q^-a folded into each term so that |q| >> 1 (tiny phi) cannot overflow
    u = math.gamma(1.0 + delta)
    scale = rho ** (1.0 + delta)
    terms = [u * q**-a]
    for k in range(a):
        terms.append(-scale * u * q ** (k - a))
        u *= (k + 1 + delta) / (k + 1)
    return math.fsum(terms)


# ---------------------------------------------------------------------------
# connection outage


def _noise_ratio(params, split):
    return split.noise_to_info / (params.n - 1)


def psi(params, split):
    """Scale of the aggregate-interference Laplace exponent at unit threshold."""
    check_antennas(params.n, minimum=2)
    d = params.delta
    equal = abs(split.phi - 1.0 / params.n) < EQUAL_SPLIT_TOL
    ratio = _moment_ratio(params.n, _noise_ratio(params, split), d, equal)
    return math.pi * params.lambda_l * params.r**2 * math.gamma(1.0 - d) * ratio


def _exact_outage(t, n, alpha):
    # 1 - e^-t [1 + sum_{p<n} (1/p!) sum_k (d t)^k zeta(p, k)],  t = beta^d psi
    d = 2.0 / alpha
    terms = []
    fact = 1.0
    for p in range(1, n):
        fact *= p
        row = _zeta_row(p, alpha)
        for k in range(1, p + 1):
            terms.append((d * t) ** k * row[p - k] / fact)
    tail = math.exp(-t) * math.fsum(terms)
    return max(0.0, -math.expm1(-t) - tail)


def connection_outage_exact(params, split, beta_b):
    """Exact connection outage probability; available for ``n <= 16``."""
    check_positive("beta_b", beta_b)
    check_antennas(params.n, minimum=2)
    if params.n > ZETA_MAX_ANTENNAS:
        raise CapabilityError(
            f"exact connection outage is limited to n <= {ZETA_MAX_ANTENNAS}; "
            "use connection_outage_approx"
        )
    t = beta_b**params.delta * psi(params, split)
    return _exact_outage(t, params.n, params.alpha)


def connection_outage_approx(params, split, beta_b):
    """Low-outage approximation ``beta^d * psi * K``; not clamped, may exceed 1."""
    check_positive("beta_b", beta_b)
    return beta_b**params.delta * psi(params, split) * k_alpha_n(params.alpha, params.n)


# ---------------------------------------------------------------------------
# secrecy outage


def _secrecy_parts(params, split, beta_e):
    check_antennas(params.n, minimum=2)
    check_positive("beta_e", beta_e)
    u = beta_e * _noise_ratio(params, split)
    own = (u + 1.0) ** (1 - params.n)  # own-transmitter noise at the eavesdropper
    return u, own, c_alpha_n(params.alpha, params.n)


def secrecy_outage_lead(params, split, beta_e):
    """Common leading-order term of both secrecy outage bounds."""
    u, own, c = _secrecy_parts(params, split, beta_e)
    if params.lambda_e == 0:
        return 0.0
    if u == 0.0:
        return math.inf
    return params.lambda_e / params.lambda_l * math.pi * own / (c * u**params.delta)


def secrecy_outage_ub(params, split, beta_e):
    return -math.expm1(-secrecy_outage_lead(params, split, beta_e))


def secrecy_outage_lb(params, split, beta_e):
    u, own, c = _secrecy_parts(params, split, beta_e)
    if params.lambda_e == 0:
        return 0.0
    eaves = math.pi * params.lambda_e
    return own * eaves / (eaves + params.lambda_l * c * u**params.delta)


# ---------------------------------------------------------------------------
# rates and capacity


def rb_approx(params, split, sigma):
    """Codeword rate supported at connection outage ``sigma`` (low-outage form)."""
    check_probability("sigma", sigma)
    slope = psi(params, split) * k_alpha_n(params.alpha, params.n)
    return math.log2(1.0 + (sigma / slope) ** (params.alpha / 2.0))


def beta_e_from_lead(params, split, epsilon, bracket=BETA_BRACKET):
    """Secrecy threshold where the leading-order secrecy outage equals ``epsilon``.

    The leading term decreases strictly in the threshold, so the root is
    bracketed in log space and found by Brent's method.
    """
    check_probability("epsilon", epsilon)
    if params.lambda_e <= 0:
        raise DomainError("rate redundancy requires lambda_e > 0")
    if split.phi == 1.0:
        raise InfeasibleError("phi = 1 leaves no artificial noise; secrecy constraint unreachable")

    ratio = _noise_ratio(params, split)
    const = math.log(params.lambda_e / params.lambda_l * math.pi / c_alpha_n(params.alpha, params.n))
    target = math.log(epsilon)

    def g(log_beta):
        # log of the leading term, kept finite over the whole bracket
        log_u = log_beta + math.log(ratio)
        return const + (1 - params.n) * float(np.logaddexp(0.0, log_u)) - params.delta * log_u - target

    lo, hi = math.log(bracket[0]), math.log(bracket[1])
    g_lo, g_hi = g(lo), g(hi)
    if g_lo < 0 or g_hi > 0:
        raise InfeasibleError(f"epsilon={epsilon} not reachable for beta_e in {bracket}")
    if g_hi == 0:
        return bracket[1]
    root = optimize.brentq(g, lo, hi, xtol=1e-14, rtol=4 * np.finfo(float).eps, maxiter=500)
    return math.exp(root)


def re_from_epsilon(params, split, epsilon):
    """Rate redundancy meeting secrecy outage ``epsilon`` (leading-order form)."""
    return math.log2(1.0 + beta_e_from_lead(params, split, epsilon))


def re_closed_form_alpha4_n2(params, split, epsilon):
    """Cardano solution of the leading-order secrecy constraint for ``alpha=4, n=2``."""
    if params.alpha != 4.0 or params.n != 2:
        raise DomainError("closed-form rate redundancy needs alpha == 4 and n == 2")
    check_probability("epsilon", epsilon)
    phi = split.phi
    a = math.pi * params.lambda_e / (epsilon * params.lambda_l * c_alpha_n(4.0, 2))
    w = 108.0 * a + 12.0 * math.sqrt((9.0 * a) ** 2 + 12.0)
    y = (w ** (2.0 / 3.0) - 12.0) / (6.0 * w ** (1.0 / 3.0))
    return math.log2(1.0 + phi / (1.0 - phi) * y * y)


def _rate_gap(params, split, sigma, epsilon):
    if split.phi == 1.0:
        return -math.inf
    r_b = rb_approx(params, split, sigma)
    # wide bracket: the optimizer may visit splits whose threshold leaves BETA_BRACKET
    r_e = math.log2(1.0 + beta_e_from_lead(params, split, epsilon, bracket=(1e-300, 1e300)))
    return r_b - r_e


def capacity_approx(params, split, sigma, epsilon):
    """Approximate secrecy transmission capacity, clamped at zero."""
    check_probability("sigma", sigma)
    if split.phi == 1.0:
        return 0.0
    r_b = rb_approx(params, split, sigma)
    r_e = re_from_epsilon(params, split, epsilon)
    return stc(params.lambda_l, sigma, RateTriple(r_b=r_b, r_e=r_e))


def optimal_phi_numeric(params, sigma, epsilon, n_scan=512, abs_tol=1e-10):
    """Split maximizing :func:`capacity_approx`: coarse scan, then golden section."""
    check_probability("sigma", sigma)
    check_probability("epsilon", epsilon)

    def objective(phi):
        return _rate_gap(params, PowerSplit(phi, params.p_total), sigma, epsilon)

    phi, gap = maximize_scalar(objective, unimodal=False, abs_tol=abs_tol, n_scan=n_scan)
    if gap <= 0:
        raise InfeasibleError("no positive secrecy capacity for any power split")
    return PowerSplit(phi, params.p_total)


def optimal_capacity(params, sigma, epsilon):
    """``(split, capacity)`` at the numeric optimum; ``(None, 0.0)`` if infeasible."""
    try:
        split = optimal_phi_numeric(params, sigma, epsilon)
    except InfeasibleError:
        return None, 0.0
    r_b = rb_approx(params, split, sigma)
    r_e = math.log2(1.0 + beta_e_from_lead(params, split, epsilon, bracket=(1e-300, 1e300)))
    return split, stc(params.lambda_l, sigma, RateTriple(r_b=r_b, r_e=r_e))
