"""Sectoring with artificial noise: outage probabilities and secrecy capacity.

Each transmitter sends its message in the sector holding its receiver and
radiates artificial noise in the other ``n - 1`` sectors.  The antenna gain
cancels from every SIR, so no gain parameter exists here.
"""

import functools
import logging
import math
from dataclasses import dataclass

from ._validation import (
    DomainError,
    InfeasibleError,
    check_antennas,
    check_positive,
    check_probability,
)
from .model import NetworkParams, PowerSplit
from .specfun import c_alpha_n
from .throughput import RateTriple, maximize_scalar, stc

log = logging.getLogger(__name__)

# Parameter set of the optimal-allocation figures, used by the closed-form self-check.
FIG5_PARAMS = dict(lambda_l=0.01, lambda_e=0.001, r=1.0)
FIG5_SIGMA, FIG5_EPSILON = 0.1, 0.01


def _check(params):
    check_antennas(params.n, minimum=2)


def _noise_term(params, split):
    # (n-1)^(1-d) * (1/phi - 1)^d ; exactly zero without artificial noise
    if split.phi == 1.0:
        return 0.0
    d = params.delta
    return (params.n - 1) ** (1.0 - d) * split.noise_to_info**d


def connection_outage_exponent(params, split, beta_b):
    """``-ln(1 - p_co)``; linear in ``lambda_l`` and ``r**2``."""
    _check(params)
    check_positive("beta_b", beta_b)
    c2 = c_alpha_n(params.alpha, 2)
    scale = beta_b**params.delta * params.lambda_l * c2 * params.r**2 / params.n
    return scale * (1.0 + _noise_term(params, split))


def connection_outage(params, split, beta_b):
    """Probability that the typical link's SIR is at most ``beta_b``."""
    return -math.expm1(-connection_outage_exponent(params, split, beta_b))


def secrecy_outage_lead(params, split, beta_e):
    """Leading-order secrecy outage term, equal to ``-ln(1 - ub)``.

    Infinite when ``phi == 1`` and eavesdroppers are present.
    """
    _check(params)
    check_positive("beta_e", beta_e)
    if params.lambda_e == 0:
        return 0.0
    noise = _noise_term(params, split)
    if noise == 0.0:
        return math.inf
    c2 = c_alpha_n(params.alpha, 2)
    ratio = params.lambda_e / params.lambda_l
    return (math.pi / c2) * ratio / (beta_e**params.delta * noise)


def secrecy_outage_ub(params, split, beta_e):
    """Upper bound on the secrecy outage probability (Jensen over the noise field)."""
    return -math.expm1(-secrecy_outage_lead(params, split, beta_e))


def secrecy_outage_lb(params, split, beta_e):
    """Lower bound on the secrecy outage probability from the nearest eavesdropper."""
    _check(params)
    check_positive("beta_e", beta_e)
    if params.lambda_e == 0:
        return 0.0
    noise = _noise_term(params, split)
    if noise == 0.0:
        return 1.0
    c2 = c_alpha_n(params.alpha, 2)
    eaves = math.pi * params.lambda_e
    return eaves / (eaves + params.lambda_l * c2 * beta_e**params.delta * noise)


def beta_b_from_sigma(params, split, sigma):
    """Connection SIR threshold at which the connection outage equals ``sigma``."""
    _check(params)
    check_probability("sigma", sigma)
    c2 = c_alpha_n(params.alpha, 2)
    base = params.n * -math.log1p(-sigma)
    base /= params.lambda_l * c2 * params.r**2 * (1.0 + _noise_term(params, split))
    return base ** (params.alpha / 2.0)


def beta_e_from_epsilon(params, split, epsilon):
    """Secrecy SIR threshold at which the secrecy outage upper bound equals ``epsilon``."""
    _check(params)
    check_probability("epsilon", epsilon)
    if params.lambda_e <= 0:
        raise DomainError("beta_e_from_epsilon requires lambda_e > 0")
    noise = _noise_term(params, split)
    if noise == 0.0:
        raise InfeasibleError("phi = 1 leaves no artificial noise; secrecy constraint unreachable")
    c2 = c_alpha_n(params.alpha, 2)
    base = (math.pi / c2) * (params.lambda_e / params.lambda_l)
    base /= -math.log1p(-epsilon) * noise
    return base ** (params.alpha / 2.0)


def rates(params, split, sigma, epsilon):
    """``(r_b, r_e)``: codeword rate and the redundancy implied by the upper bound."""
    r_b = math.log2(1.0 + beta_b_from_sigma(params, split, sigma))
    if params.lambda_e == 0:
        r_e = 0.0
    elif split.phi == 1.0:
        r_e = math.inf
    else:
        r_e = math.log2(1.0 + beta_e_from_epsilon(params, split, epsilon))
    return r_b, r_e


def rate_gap(params, split, sigma, epsilon):
    """Unclamped ``R_b - R_e``; its maximizer over ``phi`` is the capacity maximizer."""
    r_b, r_e = rates(params, split, sigma, epsilon)
    return r_b - r_e


def capacity_lb(params, split, sigma, epsilon):
    """Tight lower bound on the secrecy transmission capacity (bits/s/Hz per unit area)."""
    check_probability("epsilon", epsilon)
    r_b, r_e = rates(params, split, sigma, epsilon)
    if r_e >= r_b:
        return 0.0
    return stc(params.lambda_l, sigma, RateTriple(r_b=r_b, r_e=r_e))


@dataclass(frozen=True)
class Alpha4Intermediates:
    varrho: float
    varsigma: float
    kappa: float


def alpha4_intermediates(params, sigma, epsilon):
    _check(params)
    check_probability("sigma", sigma)
    check_probability("epsilon", epsilon)
    if params.lambda_e <= 0:
        raise DomainError("closed-form optimum requires lambda_e > 0")
    c2 = c_alpha_n(params.alpha, 2)
    varrho = params.n / (params.lambda_l * c2 * params.r**2) * -math.log1p(-sigma)
    varsigma = (math.pi / c2) * (params.lambda_e / params.lambda_l) / -math.log1p(-epsilon)
    rr, ss = varrho**2, varsigma**2
    root = math.sqrt(((varrho - varsigma) ** 2 + 1.0) * ((varrho + varsigma) ** 2 + 1.0))
    kappa = rr + ss + (rr - ss + root) * (rr - ss)
    return Alpha4Intermediates(varrho, varsigma, kappa)


def optimal_phi_alpha4(params, sigma, epsilon):
    """Closed-form capacity-maximizing split for ``alpha == 4`` (root of a cubic)."""
    if params.alpha != 4.0:
        raise DomainError(f"closed-form optimum requires alpha == 4, got {params.alpha}")
    _self_check_alpha4()
    return PowerSplit(_closed_form_phi(params, sigma, epsilon), params.p_total)


def _closed_form_phi(params, sigma, epsilon):
    m = alpha4_intermediates(params, sigma, epsilon)
    rho, vs, ka = m.varrho, m.varsigma, m.kappa
    if rho <= vs:
        raise InfeasibleError("no positive secrecy capacity (varrho <= varsigma)")
    inner = (
        2 ** (2 / 3) * rho ** (4 / 3) * vs ** (1 / 3) * ka ** (2 / 3)
        + 2 ** (4 / 3) * rho**2 * vs
        + 2 * rho ** (2 / 3) * vs ** (5 / 3) * ka ** (1 / 3)
    )
    num = vs ** (2 / 3) * inner**2
    den = 4 * (params.n - 1) * rho ** (4 / 3) * ka ** (2 / 3) * (rho**2 - vs**2) ** 2
    return 1.0 / (1.0 + num / den)


def optimal_phi_numeric(params, sigma, epsilon, abs_tol=1e-10):
    """Capacity-maximizing split for any ``alpha`` by golden-section search.

    The rate gap has a single interior maximum in ``phi`` (its derivative
    changes sign once), so golden section on the unclamped gap is exact up
    to ``abs_tol``.
    """
    _check(params)
    check_probability("sigma", sigma)
    check_probability("epsilon", epsilon)

    def objective(phi):
        return rate_gap(params, PowerSplit(phi, params.p_total), sigma, epsilon)

    phi, gap = maximize_scalar(objective, unimodal=True, abs_tol=abs_tol)
    if gap <= 0:
        raise InfeasibleError("no positive secrecy capacity for any power split")
    return PowerSplit(phi, params.p_total)


def optimal_capacity(params, sigma, epsilon):
    """``(split, capacity)`` at the numeric optimum; capacity 0 and ``None`` if infeasible."""
    try:
        split = optimal_phi_numeric(params, sigma, epsilon)
    except InfeasibleError:
        return None, 0.0
    return split, capacity_lb(params, split, sigma, epsilon)


def alpha4_discrepancies(antennas=(4, 8, 16, 32, 64)):
    """``{n: |closed form - numeric|}`` on the optimal-allocation figure parameters."""
    out = {}
    for n in antennas:
        params = NetworkParams(alpha=4.0, n=n, **FIG5_PARAMS)
        try:
            closed = _closed_form_phi(params, FIG5_SIGMA, FIG5_EPSILON)
            numeric = optimal_phi_numeric(params, FIG5_SIGMA, FIG5_EPSILON).phi
        except InfeasibleError:
            continue
        out[n] = abs(closed - numeric)
    return out


@functools.cache
def _self_check_alpha4():
    bad = {n: d for n, d in alpha4_discrepancies().items() if d > 1e-4}
    if bad:
        log.warning("alpha=4 closed-form optimum disagrees with numeric maximizer: %s", bad)
    return bad
