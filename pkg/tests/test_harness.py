import json
import math

import numpy as np
import pytest
from scipy import stats

from fouqv.core import ConfigError, RegimeError, RegularityError, SeedSpec, VolatilityFn
from fouqv.harness import (
    CLTConfig,
    ConsistencyConfig,
    VarianceConstantConfig,
    estimate_variance_constant,
    fbm_variance_benchmark,
    kolmogorov_sf,
    ks_distance,
    run_clt,
    run_consistency,
    run_replications,
    run_variance_constant,
)

import oracles


class TestKS:
    def test_quantile_midpoints(self):
        u = (np.arange(1000) + 0.5) / 1000
        d, p = ks_distance(stats.norm.ppf(u))
        assert d <= 0.001 and p > 0.99

    def test_single_zero(self):
        d, _ = ks_distance([0.0])
        assert d == pytest.approx(0.5)

    def test_all_equal(self):
        x = 0.7
        d, p = ks_distance(np.full(500, x))
        assert d == pytest.approx(max(stats.norm.cdf(x), 1 - stats.norm.cdf(x)))
        assert p < 1e-10

    def test_empty(self):
        with pytest.raises(ConfigError):
            ks_distance([])

    def test_distance_matches_scipy(self):
        x = np.random.default_rng(0).standard_normal(300) * 1.1
        d, _ = ks_distance(x)
        assert d == pytest.approx(stats.kstest(x, "norm").statistic, rel=1e-12)

    @pytest.mark.parametrize("lam", [0.2, 0.5, 0.8, 1.0, 1.17, 1.19, 1.5, 2.0, 3.0])
    def test_series_matches_kstwobign(self, lam):
        assert kolmogorov_sf(lam) == pytest.approx(stats.kstwobign.sf(lam), rel=1e-9, abs=1e-15)

    def test_p_value_uniform_under_null(self):
        ps = [ks_distance(np.random.default_rng(i).standard_normal(200))[1] for i in range(400)]
        assert 0.005 <= np.mean(np.array(ps) < 0.05) <= 0.1


class TestBenchmark:
    def test_brownian(self):
        assert fbm_variance_benchmark(0.5) == pytest.approx(2.0, abs=1e-12)

    @pytest.mark.parametrize("H", [0.3, 0.6, 0.7])
    def test_matches_bruteforce_sum(self, H):
        assert fbm_variance_benchmark(H) == pytest.approx(oracles.fgn_rho_squared_sum(H), rel=1e-10)

    def test_infinite_beyond_three_quarters(self):
        assert math.isinf(fbm_variance_benchmark(0.75))
        assert math.isinf(fbm_variance_benchmark(0.8))


class TestConfigs:
    def test_zero_replications(self):
        with pytest.raises(ConfigError):
            run_consistency(ConsistencyConfig(h=0.6, replications=0))

    def test_bad_ladder(self):
        with pytest.raises(ConfigError):
            ConsistencyConfig(h=0.6, n_ladder=(512, 256)).validate()
        with pytest.raises(ConfigError):
            ConsistencyConfig(h=0.6, T=0.3, n_ladder=(5,)).validate()

    def test_regularity(self):
        with pytest.raises(RegularityError):
            ConsistencyConfig(h=0.6, sigma=VolatilityFn.holder(1, 1, 0.5, 0.3)).validate()

    def test_clt_regime(self):
        with pytest.raises(RegimeError, match="3/4"):
            run_clt(CLTConfig(h=0.8))

    def test_clt_beta_and_r(self):
        with pytest.raises(ConfigError, match="beta"):
            CLTConfig(h=0.6, sigma=VolatilityFn.holder(1, 1, 0.5, 0.45)).validate()
        with pytest.raises(ConfigError, match="300"):
            CLTConfig(h=0.6, replications=100).validate()


class TestReplications:
    def test_order_independence(self):
        cfg = ConsistencyConfig(h=0.7, n_ladder=(128, 256), replications=12)
        a = run_consistency(cfg)
        b = run_consistency(cfg, order=list(reversed(range(12))))
        assert a.to_json() == b.to_json()

    def test_parallel_matches_serial(self):
        cfg = ConsistencyConfig(h=0.7, n_ladder=(128,), replications=8)
        assert run_consistency(cfg).to_json() == run_consistency(cfg, workers=2).to_json()

    def test_missing_replication_rejected(self):
        from fouqv.harness import _ordered
        with pytest.raises(RuntimeError):
            _ordered({0: 1, 2: 3}, 3)

    def test_run_replications_mapping(self):
        assert run_replications(abs, [2, -1, 0]) == {2: 2, -1: 1, 0: 0}


class TestConsistency:
    def test_report_schema(self):
        r = run_consistency(ConsistencyConfig(h=0.6, n_ladder=(256, 1024, 4096), replications=20))
        ladder = r.results["ladder"]
        assert [row["n"] for row in ladder] == [256, 1024, 4096]
        assert r.verdicts["median_decreasing"]
        doc = json.loads(r.to_json())
        assert doc["passed"] is True and "timings" not in doc

    def test_bias_within_3se(self):
        r = run_consistency(ConsistencyConfig(h=0.6, n_ladder=(1024, 4096), replications=100))
        for row in r.results["ladder"]:
            assert abs(row["mean_bias_T"]) <= 3 * row["bias_se_T"]

    def test_drift_bound_verdict(self):
        r = run_consistency(ConsistencyConfig(h=0.7, sigma=VolatilityFn.constant(0.0), theta=1.5,
                                              x0=1.0, n_ladder=(256, 1024), replications=10))
        assert r.verdicts["drift_bound"]


class TestVarianceConstant:
    def test_brownian_constant(self):
        c = estimate_variance_constant(0.5, 1024, 2000, SeedSpec(3))
        se = 2 * math.sqrt(2 / 1999) * math.sqrt(1 + 1)  # generous: kurtosis of chi-square terms
        assert abs(c - 2.0) < 3 * se

    def test_report(self):
        r = run_variance_constant(VarianceConstantConfig(h=0.6, n=1024, replications=1000))
        assert r.verdicts["seed_batches_agree"]
        assert r.results["fbm_benchmark"] == pytest.approx(oracles.fgn_rho_squared_sum(0.6), rel=1e-9)


class TestCLT:
    def test_report_and_reproducible(self):
        cfg = CLTConfig(h=0.6, n=1024, replications=300, calibration_replications=300)
        a, b = run_clt(cfg), run_clt(cfg)
        assert a.to_json() == b.to_json()
        std = np.array([s.standardized for s in a.samples])
        assert std.size == 300 and np.all(np.isfinite(std))
        assert a.results["ks_p_value"] == ks_distance(std)[1]
        assert set(a.verdicts) == {"ks_normal", "two_time_ratio", "mixed_normal_slope"}
