import math
import pickle

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

from adhoc_secrecy import beamforming as bf
from adhoc_secrecy import montecarlo as mc
from adhoc_secrecy import sectoring
from adhoc_secrecy._validation import DomainError
from adhoc_secrecy.model import NetworkParams, PowerSplit

TRIALS = 20_000


def net(n=4, **kw):
    base = dict(lambda_l=0.01, lambda_e=0.001, r=1.0, alpha=4.0)
    base.update(kw)
    return NetworkParams(n=n, **base)


def cfg(trials=TRIALS, seed=1, **kw):
    return mc.McConfig(trials=trials, seed=seed, **kw)


def ecdf_distance(samples, cdf):
    xs = np.sort(samples)
    f = np.array([cdf(x) for x in xs])
    i = np.arange(1, len(xs) + 1) / len(xs)
    return max(np.max(i - f), np.max(f - (i - 1 / len(xs))))


class TestConfig:
    def test_min_trials(self):
        with pytest.raises(DomainError, match="trials"):
            mc.McConfig(trials=99)
        mc.McConfig(trials=100)

    @pytest.mark.parametrize("seed", [-1, 2**64, 1.5])
    def test_seed_range(self, seed):
        with pytest.raises(DomainError, match="seed"):
            mc.McConfig(seed=seed)

    def test_window_floor(self):
        with pytest.raises(DomainError, match="10 r"):
            cfg(window=mc.SimWindow(5.0)).window_for(net())

    def test_default_window(self):
        assert mc.default_window(net()).radius == 50.0
        # dense interferers push the truncation radius beyond 50 r
        p = net(lambda_l=1.0, alpha=3.0)
        radius = mc.default_window(p, 1e-3).radius
        assert radius == pytest.approx(2 * math.pi / 1e-3, rel=1e-12)
        tail = 2 * math.pi * p.lambda_l * radius ** (2 - p.alpha) / (p.alpha - 2)
        assert tail == pytest.approx(1e-3, rel=1e-9)


class TestEstimate:
    @given(st.integers(0, 1000), st.integers(1, 1000))
    def test_wilson_contains_p(self, hits, extra):
        trials = hits + extra
        lo, hi = mc.wilson_interval(hits, trials)
        p = hits / trials
        assert 0 <= lo <= p <= hi <= 1

    def test_wilson_reference(self):
        lo, hi = mc.wilson_interval(10, 100)
        # statsmodels proportion_confint(10, 100, method="wilson")
        assert lo == pytest.approx(0.0552291, abs=1e-6)
        assert hi == pytest.approx(0.1743657, abs=1e-6)

    def test_from_counts(self):
        e = mc.McEstimate.from_counts(250, 1000, 7, 50.0)
        assert e.p_hat == 0.25
        assert e.std_err == pytest.approx(math.sqrt(0.25 * 0.75 / 1000), rel=1e-15)
        d = e.to_dict()
        assert d["ci95_lo"] < 0.25 < d["ci95_hi"]
        assert d["seed"] == 7 and d["trials"] == 1000
        assert e.within(0.25 + 2.9 * e.std_err) and not e.within(0.25 + 3.1 * e.std_err)

    def test_picklable(self):
        e = mc.McEstimate.from_counts(3, 100, 0, 50.0)
        assert pickle.loads(pickle.dumps(e)) == e


class TestSamplePpp:
    def test_empty(self):
        pts = mc.sample_ppp(0.0, mc.SimWindow(10.0), np.random.default_rng(0))
        assert pts.shape == (0, 2)

    def test_mean_count_and_support(self):
        rng = np.random.default_rng(3)
        w = mc.SimWindow(5.0)
        counts = []
        for _ in range(10_000):
            pts = mc.sample_ppp(0.1, w, rng)
            assert np.all(np.hypot(pts[:, 0], pts[:, 1]) <= 5.0)
            counts.append(len(pts))
        mean = 0.1 * math.pi * 25
        assert abs(np.mean(counts) - mean) < 3 * math.sqrt(mean / len(counts))
        assert np.var(counts) == pytest.approx(mean, rel=0.05)

    def test_half_disc_independence(self):
        rng = np.random.default_rng(11)
        w = mc.SimWindow(3.0)
        left, right = [], []
        for _ in range(5000):
            pts = mc.sample_ppp(0.1, w, rng)
            left.append(int(np.sum(pts[:, 0] < 0)))
            right.append(len(pts) - left[-1])
        # contingency table on capped counts
        cap = 3
        table = np.zeros((cap + 1, cap + 1))
        for a, b in zip(left, right):
            table[min(a, cap), min(b, cap)] += 1
        _, pvalue, _, _ = stats.chi2_contingency(table)
        assert pvalue > 0.01

    def test_radial_uniformity(self):
        pts = mc.sample_ppp(1.0, mc.SimWindow(10.0), np.random.default_rng(5))
        r2 = np.hypot(pts[:, 0], pts[:, 1]) ** 2 / 100.0
        assert stats.kstest(r2, "uniform").pvalue > 0.01


class TestInterferencePower:
    def test_mean(self):
        rng = np.random.default_rng(2)
        s = bf.InterferencePdfSpec(0.3, 2.0, 4)
        x = mc.sample_interference_power(s, rng, size=100_000)
        assert abs(x.mean() - 2.0) < 3 * x.std() / math.sqrt(len(x))

    @pytest.mark.parametrize("n", [2, 4])
    def test_equal_split_is_gamma(self, n):
        s = bf.InterferencePdfSpec(1.0 / n, 1.0, n)
        x = mc.sample_interference_power(s, np.random.default_rng(n), size=100_000)
        xs = np.sort(x)
        f = stats.gamma.cdf(xs, a=n, scale=1.0 / n)
        i = np.arange(1, len(xs) + 1) / len(xs)
        assert np.max(np.abs(i - f)) < 0.01

    def test_matches_integrated_pdf(self):
        s = bf.InterferencePdfSpec(0.9, 1.0, 2)
        x = mc.sample_interference_power(s, np.random.default_rng(9), size=100_000)
        grid = np.quantile(x, np.linspace(0.01, 0.99, 60))
        emp = np.searchsorted(np.sort(x), grid, side="right") / len(x)
        ana = np.array([bf.interference_cdf(s, z) for z in grid])
        assert np.max(np.abs(emp - ana)) < 0.01

    def test_scalar(self):
        s = bf.InterferencePdfSpec(0.5, 1.0, 3)
        assert isinstance(mc.sample_interference_power(s, np.random.default_rng(0)), float)


class TestSectoringPco:
    def test_matches_analytic(self):
        p, split = net(4), PowerSplit(0.5)
        est = mc.sim_sectoring_pco(p, split, 1.0, cfg(50_000))
        assert est.within(sectoring.connection_outage(p, split, 1.0))

    def test_tiny_threshold(self):
        est = mc.sim_sectoring_pco(net(4), PowerSplit(0.5), 1e-9, cfg(2000))
        assert est.p_hat == 0.0

    def test_no_interferers(self):
        est = mc.sim_sectoring_pco(net(4, lambda_l=1e-12), PowerSplit(0.5), 10.0, cfg(2000))
        assert est.p_hat == 0.0

    def test_antenna_ordering_at_full_information_power(self):
        split = PowerSplit(1.0)
        p2 = mc.sim_sectoring_pco(net(2), split, 3.0, cfg(40_000, seed=4))
        p4 = mc.sim_sectoring_pco(net(4), split, 3.0, cfg(40_000, seed=5))
        a2 = sectoring.connection_outage(net(2), split, 3.0)
        a4 = sectoring.connection_outage(net(4), split, 3.0)
        assert a2 > a4
        assert p2.within(a2) and p4.within(a4)
        assert p2.p_hat > p4.p_hat

    def test_rejects_single_antenna(self):
        with pytest.raises(DomainError):
            mc.sim_sectoring_pco(net(1), PowerSplit(0.5), 1.0, cfg())


class TestSectoringPso:
    def test_no_eavesdroppers(self):
        assert mc.sim_sectoring_pso(net(4, lambda_e=0.0), PowerSplit(0.5), 1.0, cfg(1000)).p_hat == 0.0

    def test_sandwich(self):
        p = net(4)
        for phi in (0.2, 0.6):
            split = PowerSplit(phi)
            est = mc.sim_sectoring_pso(p, split, 1.0, cfg(TRIALS, seed=int(phi * 10)))
            slack = 3 * est.std_err
            assert sectoring.secrecy_outage_lb(p, split, 1.0) - slack <= est.p_hat
            assert est.p_hat <= sectoring.secrecy_outage_ub(p, split, 1.0) + slack

    def test_no_noise_leaks_to_any_eavesdropper(self):
        p = net(4)
        w = mc.SimWindow(60.0)
        est = mc.sim_sectoring_pso(p, PowerSplit(1.0), 1.0, cfg(5000, window=w))
        # every eavesdropper in the window hears the message free of noise
        want = -math.expm1(-p.lambda_e / p.n * math.pi * 60.0**2)
        assert est.within(want)
        big = mc.sim_sectoring_pso(p, PowerSplit(1.0), 1.0, cfg(2000, window=mc.SimWindow(400.0)))
        assert big.p_hat == 1.0


class TestBeamformingPco:
    @pytest.mark.parametrize("n", [2, 4])
    def test_matches_exact(self, n):
        p, split = net(n), PowerSplit(0.5)
        est = mc.sim_beamforming_pco(p, split, 3.0, cfg(30_000, seed=n))
        assert est.within(bf.connection_outage_exact(p, split, 3.0))

    def test_rejects_single_antenna(self):
        with pytest.raises(DomainError):
            mc.sim_beamforming_pco(net(1), PowerSplit(0.5), 1.0, cfg())

    def test_std_err_scaling(self):
        p, split = net(2), PowerSplit(0.3)
        a = mc.sim_beamforming_pco(p, split, 3.0, cfg(10_000))
        b = mc.sim_beamforming_pco(p, split, 3.0, cfg(20_000))
        assert b.std_err / a.std_err == pytest.approx(1 / math.sqrt(2), rel=0.2)
        assert b.ci95[1] - b.ci95[0] < a.ci95[1] - a.ci95[0]


class TestBeamformingPso:
    def test_no_eavesdroppers(self):
        assert mc.sim_beamforming_pso(net(4, lambda_e=0.0), PowerSplit(0.5), 3.0, cfg(1000)).p_hat == 0.0

    @pytest.mark.parametrize("n", [2, 4])
    def test_sandwich(self, n):
        p, split = net(n), PowerSplit(0.5)
        est = mc.sim_beamforming_pso(p, split, 3.0, cfg(TRIALS, seed=n))
        slack = 3 * est.std_err
        assert bf.secrecy_outage_lb(p, split, 3.0) - slack <= est.p_hat
        assert est.p_hat <= bf.secrecy_outage_ub(p, split, 3.0) + slack


class TestReproducibility:
    def test_worker_count_does_not_change_result(self):
        p, split = net(4), PowerSplit(0.4)
        one = mc.sim_beamforming_pco(p, split, 3.0, cfg(5500, seed=42))
        many = mc.sim_beamforming_pco(p, split, 3.0, cfg(5500, seed=42, workers=4))
        assert one == many
        sec1 = mc.sim_sectoring_pso(p, split, 1.0, cfg(3000, seed=42))
        sec4 = mc.sim_sectoring_pso(p, split, 1.0, cfg(3000, seed=42, workers=3))
        assert sec1 == sec4

    def test_seed_changes_result(self):
        p, split = net(4), PowerSplit(0.4)
        a = mc.sim_sectoring_pco(p, split, 3.0, cfg(5000, seed=1))
        b = mc.sim_sectoring_pco(p, split, 3.0, cfg(5000, seed=2))
        assert a.p_hat != b.p_hat

    def test_prefix_blocks_shared(self):
        # block seeds depend only on the block index, so a longer run extends a shorter one
        p, split = net(2), PowerSplit(0.5)
        a = mc.sim_sectoring_pco(p, split, 3.0, cfg(2000, seed=9))
        b = mc.sim_sectoring_pco(p, split, 3.0, cfg(4000, seed=9))
        hits_a = round(a.p_hat * 2000)
        hits_b = round(b.p_hat * 4000)
        assert hits_b >= hits_a

    def test_block_rng_streams_differ(self):
        a = mc.block_rng(0, 0).random(4)
        b = mc.block_rng(0, 1).random(4)
        assert not np.array_equal(a, b)
        assert np.array_equal(a, mc.block_rng(0, 0).random(4))


class TestWindowAdequacy:
    @pytest.mark.parametrize(
        "sim, beta",
        [(mc.sim_sectoring_pco, 1.0), (mc.sim_beamforming_pco, 3.0)],
    )
    def test_doubling_connection_window(self, sim, beta):
        p, split = net(4), PowerSplit(0.5)
        base = mc.default_window(p).radius
        a = sim(p, split, beta, cfg(TRIALS, seed=3, window=mc.SimWindow(base)))
        b = sim(p, split, beta, cfg(TRIALS, seed=4, window=mc.SimWindow(2 * base)))
        assert abs(a.p_hat - b.p_hat) < 2 * math.hypot(a.std_err, b.std_err)

    def test_doubling_secrecy_window(self):
        p, split = net(4), PowerSplit(0.5)
        c = cfg(TRIALS, seed=3)
        radius, _ = mc.secrecy_windows(p, split, 1.0, False, c)
        a = mc.sim_sectoring_pso(p, split, 1.0, c)
        b = mc.sim_sectoring_pso(p, split, 1.0, cfg(TRIALS, seed=4, window=mc.SimWindow(2 * radius)))
        assert abs(a.p_hat - b.p_hat) < 2 * math.hypot(a.std_err, b.std_err)

    def test_secrecy_windows_shape(self):
        p, split = net(4), PowerSplit(0.5)
        noise_r, eave_r = mc.secrecy_windows(p, split, 1.0, True, cfg())
        assert noise_r > eave_r > 0
        assert mc.secrecy_windows(p, PowerSplit(1.0), 1.0, True, cfg()) == (50.0, 50.0)
        fixed = cfg(window=mc.SimWindow(20.0))
        assert mc.secrecy_windows(p, split, 1.0, True, fixed)[0] == 20.0


@settings(max_examples=10)
@given(st.floats(0.05, 0.95), st.integers(2, 6))
def test_estimates_are_probabilities(phi, n):
    est = mc.sim_beamforming_pco(net(n), PowerSplit(phi), 3.0, cfg(200))
    assert 0 <= est.ci95[0] <= est.p_hat <= est.ci95[1] <= 1
