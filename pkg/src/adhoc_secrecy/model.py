"""Network and power-allocation parameters shared by both transmission schemes."""

from dataclasses import dataclass, field, replace

from ._validation import (
    DomainError,
    check_alpha,
    check_antennas,
    check_nonnegative,
    check_positive,
    check_probability,
)


@dataclass(frozen=True)
class NetworkParams:
    """Bipolar Poisson network.

    lambda_l: transmitter density, lambda_e: eavesdropper density (both per
    unit area), r: link distance, alpha: path-loss exponent, n: antennas per
    transmitter, p_total: transmit power.
    """

    lambda_l: float
    lambda_e: float
    r: float
    alpha: float
    n: int
    p_total: float = 1.0

    def __post_init__(self):
        check_positive("lambda_l", self.lambda_l)
        check_nonnegative("lambda_e", self.lambda_e)
        check_positive("r", self.r)
        object.__setattr__(self, "alpha", check_alpha(self.alpha))
        object.__setattr__(self, "n", check_antennas(self.n, minimum=1))
        check_positive("p_total", self.p_total)

    @property
    def delta(self):
        """``2 / alpha``, the exponent that recurs in every closed form."""
        return 2.0 / self.alpha

    def with_(self, **changes):
        return replace(self, **changes)


@dataclass(frozen=True)
class PowerSplit:
    """Fraction ``phi`` of the transmit power carried by the information signal."""

    phi: float
    p_total: float = 1.0
    p_i: float = field(init=False)
    p_a: float = field(init=False)

    def __post_init__(self):
        check_positive("p_total", self.p_total)
        phi = self.phi
        if not (0.0 < phi <= 1.0):
            raise DomainError(f"phi must lie in (0, 1], got {phi!r}")
        p_i = self.p_total * phi
        object.__setattr__(self, "p_i", p_i)
        object.__setattr__(self, "p_a", self.p_total - p_i)

    @property
    def noise_to_info(self):
        """``1/phi - 1``, the artificial-noise to information power ratio."""
        return 1.0 / self.phi - 1.0


@dataclass(frozen=True)
class OutageConstraints:
    sigma: float
    epsilon: float

    def __post_init__(self):
        check_probability("sigma", self.sigma)
        check_probability("epsilon", self.epsilon)


@dataclass(frozen=True)
class SirThresholds:
    beta_b: float
    beta_e: float

    def __post_init__(self):
        check_positive("beta_b", self.beta_b)
        check_positive("beta_e", self.beta_e)
