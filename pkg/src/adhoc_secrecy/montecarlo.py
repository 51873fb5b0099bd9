"""Monte Carlo simulation of the Poisson network, independent of every closed form.

Each trial drops Poisson fields of transmitters and eavesdroppers on a disc,
draws Rayleigh fading, forms the SIRs directly and records the outage
indicator.  Trials are grouped into fixed blocks of :data:`BLOCK_TRIALS`; block
``b`` draws from ``SeedSequence(seed, spawn_key=(b,))``, so the estimate
depends only on ``(seed, trials)`` and never on how blocks are scheduled.
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from ._validation import DomainError, check_antennas, check_nonnegative, check_positive
from .specfun import c_alpha_n

log = logging.getLogger(__name__)

BLOCK_TRIALS = 1000
MIN_TRIALS = 100
MAX_NOISE_NODES = 20_000  # mean noise emitters per trial in the secrecy window
Z95 = 1.959963984540054


@dataclass(frozen=True)
class SimWindow:
    """Disc of the given radius standing in for the infinite plane."""

    radius: float

    def __post_init__(self):
        check_positive("radius", self.radius)


def default_window(params, delta_trunc=1e-3):
    """Window radius ``max(50 r, R)``.

    ``R`` keeps the mean interference from nodes beyond the disc,
    ``2 pi lambda_l P R^(2-alpha) / (alpha-2)``, below ``delta_trunc`` times
    the mean received signal power ``P r^-alpha``.
    """
    a = params.alpha
    r_trunc = (2 * math.pi * params.lambda_l * params.r**a / ((a - 2) * delta_trunc)) ** (1 / (a - 2))
    return SimWindow(max(50.0 * params.r, r_trunc))


@dataclass(frozen=True)
class McConfig:
    trials: int = 100_000
    seed: int = 0
    window: SimWindow = None
    delta_trunc: float = 1e-3
    workers: int = 1

    def __post_init__(self):
        if int(self.trials) != self.trials or self.trials < MIN_TRIALS:
            raise DomainError(f"trials must be an integer >= {MIN_TRIALS}, got {self.trials!r}")
        if int(self.seed) != self.seed or not 0 <= self.seed < 2**64:
            raise DomainError(f"seed must be an integer in [0, 2^64), got {self.seed!r}")
        check_positive("delta_trunc", self.delta_trunc)
        if self.workers < 1:
            raise DomainError("workers must be >= 1")

    def window_for(self, params):
        window = self.window or default_window(params, self.delta_trunc)
        if window.radius < 10 * params.r:
            raise DomainError(f"window radius {window.radius} must be at least 10 r = {10 * params.r}")
        return window


@dataclass(frozen=True)
class McEstimate:
    p_hat: float
    std_err: float
    ci95: tuple
    trials: int
    seed: int
    radius: float = field(default=math.nan)

    @classmethod
    def from_counts(cls, hits, trials, seed, radius):
        p = hits / trials
        se = math.sqrt(p * (1 - p) / trials)
        return cls(p, se, wilson_interval(hits, trials), trials, seed, radius)

    def within(self, value, k=3.0):
        """``|p_hat - value| <= k * std_err``."""
        return abs(self.p_hat - value) <= k * self.std_err

    def to_dict(self):
        d = asdict(self)
        d["ci95_lo"], d["ci95_hi"] = d.pop("ci95")
        return d


def wilson_interval(hits, trials, z=Z95):
    p = hits / trials
    denom = 1 + z * z / trials
    centre = (p + z * z / (2 * trials)) / denom
    half = z * math.sqrt(p * (1 - p) / trials + z * z / (4 * trials * trials)) / denom
    # clamp so rounding can never put p_hat outside its own interval
    return (min(p, max(0.0, centre - half)), max(p, min(1.0, centre + half)))


# ---------------------------------------------------------------------------
# sampling primitives


def block_rng(seed, block):
    return np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(block,)))


def sample_ppp(density, window, rng):
    """Homogeneous Poisson points on the window disc, shape ``(k, 2)``."""
    check_nonnegative("density", density)
    count = rng.poisson(density * math.pi * window.radius**2)
    return _uniform_disc(rng, count, window.radius)


def _uniform_disc(rng, count, radius):
    rad = radius * np.sqrt(rng.random(count))
    ang = 2 * math.pi * rng.random(count)
    return np.column_stack((rad * np.cos(ang), rad * np.sin(ang)))


def _ppp_block(rng, density, radius, trials):
    """Independent fields for ``trials`` trials, flattened and ordered by trial."""
    counts = rng.poisson(density * math.pi * radius**2, size=trials)
    owner = np.repeat(np.arange(trials), counts)
    return counts, owner, _uniform_disc(rng, int(counts.sum()), radius)


def _cn(rng, shape):
    # circularly-symmetric complex Gaussian, unit variance per entry
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) * math.sqrt(0.5)


def sample_interference_power(spec, rng, size=None):
    """Interference power from one beamforming transmitter at an unintended receiver.

    Uses the intended direction ``[1, 0, ..., 0]`` and a fresh unit-variance
    complex Gaussian cross channel.
    """
    check_antennas(spec.n, minimum=2)
    shape = (1 if size is None else size, spec.n)
    mag = np.abs(_cn(rng, shape)) ** 2
    px = spec.p_i * mag[:, 0] + spec.noise_var * mag[:, 1:].sum(axis=1)
    return float(px[0]) if size is None else px


def _pairs(counts_a, owner_e):
    """Index every (eavesdropper, transmitter) pair belonging to the same trial."""
    starts = np.concatenate(([0], np.cumsum(counts_a)[:-1]))
    per_e = counts_a[owner_e]
    pair_e = np.repeat(np.arange(len(owner_e)), per_e)
    first = np.concatenate(([0], np.cumsum(per_e)[:-1]))
    offset = np.arange(int(per_e.sum())) - np.repeat(first, per_e)
    pair_a = np.repeat(starts[owner_e], per_e) + offset
    return pair_e, pair_a


# ---------------------------------------------------------------------------
# per-block simulators; each returns the number of outage trials


def _sectoring_pco_block(rng, trials, radius, params, split, beta_b):
    n, a = params.n, params.alpha
    _, owner, pts = _ppp_block(rng, params.lambda_l, radius, trials)
    info = rng.random(len(owner)) < 1.0 / n
    power = np.where(info, split.p_i, split.p_a / (n - 1))
    gain = rng.exponential(size=len(owner))
    dist = np.hypot(pts[:, 0], pts[:, 1])
    interference = np.bincount(owner, weights=power * gain * dist**-a, minlength=trials)
    signal = split.p_i * rng.exponential(size=trials) * params.r**-a
    return int(np.count_nonzero(signal <= beta_b * interference))


def _beamforming_pco_block(rng, trials, radius, params, split, beta_b):
    n, a = params.n, params.alpha
    _, owner, pts = _ppp_block(rng, params.lambda_l, radius, trials)
    m = len(owner)
    h = _cn(rng, (m, n))  # each interferer's own intended channel
    hz = _cn(rng, (m, n))  # cross channel to the typical receiver
    along = np.abs(np.sum(h.conj() * hz, axis=1)) ** 2 / np.sum(np.abs(h) ** 2, axis=1)
    total = np.sum(np.abs(hz) ** 2, axis=1)
    px = split.p_i * along + split.p_a / (n - 1) * np.maximum(total - along, 0.0)
    dist = np.hypot(pts[:, 0], pts[:, 1])
    interference = np.bincount(owner, weights=px * dist**-a, minlength=trials)
    own = np.sum(np.abs(_cn(rng, (trials, n))) ** 2, axis=1)
    signal = split.p_i * own * params.r**-a
    return int(np.count_nonzero(signal <= beta_b * interference))


def _secrecy_block(rng, trials, radius, params, split, beta_e, beamforming, eave_radius):
    n, a = params.n, params.alpha
    noise_density, eave_density = _secrecy_densities(params, beamforming)
    counts_e, owner_e, pts_e = _ppp_block(rng, eave_density, eave_radius, trials)
    if len(owner_e) == 0:
        return 0
    if split.p_a == 0:
        # no artificial noise: every eavesdropper decodes
        return int(np.count_nonzero(counts_e))
    # noise fields only matter in trials that contain an eavesdropper
    active = np.flatnonzero(counts_e)
    counts_a = np.zeros(trials, dtype=np.int64)
    counts_a[active] = rng.poisson(noise_density * math.pi * radius**2, size=len(active))
    pts_a = _uniform_disc(rng, int(counts_a.sum()), radius)
    m_e = len(owner_e)
    pair_e, pair_a = _pairs(counts_a, owner_e)
    diff = pts_a[pair_a] - pts_e[pair_e]
    d_xz = np.hypot(diff[:, 0], diff[:, 1])
    if beamforming:
        fade = rng.gamma(n - 1, size=len(pair_e))
    else:
        fade = rng.exponential(size=len(pair_e))
    noise_var = split.p_a / (n - 1)
    noise = np.bincount(pair_e, weights=noise_var * fade * d_xz**-a, minlength=m_e)
    d_oz = np.hypot(pts_e[:, 0], pts_e[:, 1])
    s_oz = rng.exponential(size=m_e)
    if beamforming:
        # the typical transmitter's own null-space noise also reaches the eavesdropper
        noise = noise + noise_var * rng.gamma(n - 1, size=m_e) * d_oz**-a
    signal = split.p_i * s_oz * d_oz**-a
    leaked = signal > beta_e * noise
    per_trial = np.bincount(owner_e, weights=leaked, minlength=trials)
    return int(np.count_nonzero(per_trial))


def _secrecy_densities(params, beamforming):
    """``(noise emitter density, eavesdropper density)`` seen by the typical transmitter."""
    if beamforming:
        return params.lambda_l, params.lambda_e
    return (params.n - 1) * params.lambda_l / params.n, params.lambda_e / params.n


def secrecy_windows(params, split, beta_e, beamforming, cfg):
    """``(noise radius, eavesdropper radius)`` for the secrecy simulators.

    An eavesdropper at distance ``d`` leaks with probability of order
    ``exp(-k d^2)``.  Eavesdroppers are drawn out to the radius where that
    falls below ``delta_trunc``.  The noise field must extend well past them:
    noise missing beyond ``R`` inflates the leak probability by a relative
    amount of about ``2 pi lambda_a beta E[noise gain] Gamma(1 + alpha/2) /
    ((alpha - 2) k^(alpha/2) R^(alpha-2))``, which is held below
    ``delta_trunc``.  These radii only size the simulation; the estimate is
    still a plain outage frequency.
    """
    base = cfg.window_for(params).radius
    noise_ratio = split.noise_to_info / (params.n - 1)
    if noise_ratio == 0:
        return base, base
    a, d = params.alpha, params.delta
    noise_density, eave_density = _secrecy_densities(params, beamforming)
    if beamforming:
        k = params.lambda_l * c_alpha_n(a, params.n) * (beta_e * noise_ratio) ** d
        gain = params.n - 1
    else:
        k = noise_density * c_alpha_n(a, 2) * (beta_e * noise_ratio) ** d
        gain = 1.0
    eave_radius = math.sqrt(math.log(1.0 / cfg.delta_trunc) / k)
    if cfg.window is not None:
        return base, min(eave_radius, base)
    excess = 2 * math.pi * noise_density * beta_e * noise_ratio * gain * math.gamma(1 + a / 2)
    excess /= (a - 2) * k ** (a / 2) * cfg.delta_trunc
    radius = max(base, eave_radius + excess ** (1 / (a - 2)))
    if noise_density * math.pi * radius**2 > MAX_NOISE_NODES:
        capped = math.sqrt(MAX_NOISE_NODES / (noise_density * math.pi))
        log.warning("noise window %.4g capped at %.4g; edge bias may exceed delta_trunc", radius, capped)
        radius = max(base, capped)
    log.debug(
        "eavesdroppers beyond %.4g leak with expected count %.3g",
        eave_radius,
        eave_density * math.pi * math.exp(-k * eave_radius**2) / k,
    )
    return radius, eave_radius


def _run(block_fn, cfg, params, *args, radius=None):
    if radius is None:
        radius = cfg.window_for(params).radius
    n_blocks = -(-cfg.trials // BLOCK_TRIALS)

    def one(b):
        size = min(BLOCK_TRIALS, cfg.trials - b * BLOCK_TRIALS)
        return block_fn(block_rng(cfg.seed, b), size, radius, params, *args)

    if cfg.workers > 1:
        with ThreadPoolExecutor(cfg.workers) as pool:
            hits = sum(pool.map(one, range(n_blocks)))
    else:
        hits = sum(one(b) for b in range(n_blocks))
    return McEstimate.from_counts(hits, cfg.trials, cfg.seed, radius)


def sim_sectoring_pco(params, split, beta_b, cfg):
    """Connection outage of the sectoring scheme, typical receiver at the origin."""
    check_antennas(params.n, minimum=2)
    check_positive("beta_b", beta_b)
    return _run(_sectoring_pco_block, cfg, params, split, beta_b)


def sim_sectoring_pso(params, split, beta_e, cfg):
    """Secrecy outage of the sectoring scheme against worst-case eavesdroppers."""
    check_antennas(params.n, minimum=2)
    check_positive("beta_e", beta_e)
    radius, eave_radius = secrecy_windows(params, split, beta_e, False, cfg)
    return _run(_secrecy_block, cfg, params, split, beta_e, False, eave_radius, radius=radius)


def sim_beamforming_pco(params, split, beta_b, cfg):
    """Connection outage of the beamforming scheme with explicit channel construction."""
    check_antennas(params.n, minimum=2)
    check_positive("beta_b", beta_b)
    return _run(_beamforming_pco_block, cfg, params, split, beta_b)


def sim_beamforming_pso(params, split, beta_e, cfg):
    """Secrecy outage of the beamforming scheme against worst-case eavesdroppers."""
    check_antennas(params.n, minimum=2)
    check_positive("beta_e", beta_e)
    radius, eave_radius = secrecy_windows(params, split, beta_e, True, cfg)
    return _run(_secrecy_block, cfg, params, split, beta_e, True, eave_radius, radius=radius)
