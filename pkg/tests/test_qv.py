import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fouqv.core import ConfigError, GridError, SeedSpec, VolatilityFn, grid_from_points, make_uniform_grid
from fouqv.gaussian import sample_fbm, sample_y1
from fouqv.pathwise import PathTag, ProcessPath, solve_fou2
from fouqv.qv import (
    IVTarget,
    QVSeries,
    clt_statistic,
    frequency_grid,
    iv_target,
    qv_estimator,
    scaled_qv,
    sup_error,
    v_n,
)


def _path(values, T=1.0):
    return ProcessPath(make_uniform_grid(T, len(values) - 1), values, PathTag.Z_INTEGRAL)


class TestVn:
    def test_examples(self):
        assert v_n(_path(np.full(5, 2.0)), 1.0) == 0.0
        lin = _path(np.linspace(0, 1, 5))
        assert v_n(lin, 1.0) == pytest.approx(0.25)
        assert v_n(lin, 0.99) == pytest.approx(3 / 16)

    def test_inclusive_grid_points(self):
        p = _path(np.arange(11, dtype=float) ** 2 / 100, T=1.0)
        for i in range(11):
            t = i / 10
            expected = sum((((k) ** 2 - (k - 1) ** 2) / 100) ** 2 for k in range(1, i + 1))
            assert v_n(p, t) == pytest.approx(expected, abs=1e-15)

    def test_nonuniform_rejected(self):
        g = grid_from_points([0, 0.1, 0.5, 1.0])
        with pytest.raises(GridError):
            v_n(ProcessPath(g, [0, 1, 2, 3], PathTag.X_SDE), 1.0)

    def test_noninteger_frequency_rejected(self):
        with pytest.raises(GridError):
            v_n(_path(np.zeros(4), T=0.7), 0.7)

    def test_out_of_range(self):
        with pytest.raises(ConfigError):
            v_n(_path(np.zeros(5)), 1.5)

    @settings(max_examples=50, deadline=None)
    @given(st.lists(st.floats(-3, 3), min_size=9, max_size=9), st.integers(0, 8),
           st.integers(0, 8), st.floats(0.1, 4.0))
    def test_additivity_and_scaling(self, vals, i, j, c):
        p = _path(np.concatenate([[0.0], vals]), T=1.0)
        s, t = min(i, j) / 9, max(i, j) / 9
        inc = np.diff(p.values)[min(i, j):max(i, j)]
        assert v_n(p, t) == pytest.approx(v_n(p, s) + np.sum(inc**2), rel=1e-12, abs=1e-12)
        q = _path(c * p.values)
        assert v_n(q, t) == pytest.approx(c * c * v_n(p, t), rel=1e-12, abs=1e-12)
        assert scaled_qv(q, 0.7, t) == pytest.approx(c * c * scaled_qv(p, 0.7, t),
                                                     rel=1e-12, abs=1e-12)


class TestScaledQV:
    def test_brownian_scale_factor_one(self):
        p = _path(np.random.default_rng(1).standard_normal(65).cumsum())
        assert scaled_qv(p, 0.5, 1.0) == v_n(p, 1.0)

    def test_y1_near_one(self):
        y = sample_y1(0.6, frequency_grid(1, 2**14), SeedSpec(7))
        assert scaled_qv(y, 0.6, 1.0) == pytest.approx(1.0, abs=0.1)

    def test_brownian_sequence_mostly_decreasing(self):
        # one Brownian path read at n = 2^8..2^14
        fine = sample_fbm(0.5, frequency_grid(1, 2**14), SeedSpec(4))
        errs = []
        for k in range(8, 15):
            step = 2 ** (14 - k)
            sub = _path(fine.values[::step])
            errs.append(abs(scaled_qv(sub, 0.5, 1.0) - 1.0))
        dec = [b < a for a, b in zip(errs, errs[1:])]
        assert sum(dec) >= 3

    def test_drift_robustness_inequality(self):
        rng = np.random.default_rng(3)
        H, n = 0.7, 512
        for i in range(50):
            z = sample_y1(H, frequency_grid(1, n), SeedSpec(30, i))
            yv = np.cumsum(np.concatenate([[0.0], rng.standard_normal(n) * 1e-2 / n]))
            zp, yp = _path(z.values), _path(yv)
            both = _path(z.values + yv)
            lhs = abs(scaled_qv(both, H, 1) - scaled_qv(zp, H, 1))
            qy, qz = scaled_qv(yp, H, 1), scaled_qv(zp, H, 1)
            assert lhs <= qy + 2 * math.sqrt(qz * qy) + 1e-15


class TestEstimator:
    def test_monotone_and_zero_start(self):
        y = sample_y1(0.7, frequency_grid(1, 256), SeedSpec(2))
        x, _ = solve_fou2(1.0, VolatilityFn.linear(1, 0.5), 0.0, y)
        est = qv_estimator(x, 0.7)
        assert est.step and est.values[0] == 0
        assert np.all(np.diff(est.values) >= 0)
        assert est.scale_exponent == pytest.approx(0.4)

    def test_identical_to_driver_when_sigma_one(self):
        y = sample_y1(0.7, frequency_grid(1, 512), SeedSpec(2))
        x, _ = solve_fou2(0.0, VolatilityFn.constant(1.0), 0.0, y)
        assert qv_estimator(x, 0.7).values[-1] == scaled_qv(y, 0.7, 1.0)

    def test_eval_times(self):
        y = sample_y1(0.7, frequency_grid(1, 64), SeedSpec(2))
        full = qv_estimator(y, 0.7)
        part = qv_estimator(y, 0.7, eval_times=[0.0, 0.5, 1.0])
        np.testing.assert_array_equal(part.values, full.values[[0, 32, 64]])
        assert not part.step

    def test_pure_drift_rate(self):
        H, theta = 0.7, 2.0
        for n in (256, 1024):
            y = sample_y1(H, frequency_grid(1, n), SeedSpec(1))
            x, _ = solve_fou2(theta, VolatilityFn.constant(0.0), 1.0, y)
            bound = theta**2 * np.max(np.abs(x.values)) ** 2 * n ** (2 * H - 2)
            assert qv_estimator(x, H).values[-1] <= bound

    def test_integrated_volatility(self):
        sig = VolatilityFn.linear(1, 0.5)
        errs = []
        for r in range(5):
            y = sample_y1(0.7, frequency_grid(1, 2**13), SeedSpec(0, r))
            x, _ = solve_fou2(1.0, sig, 0.0, y)
            est = qv_estimator(x, 0.7)
            errs.append(sup_error(est, iv_target(sig, est.times)))
        assert np.median(errs) < 0.05


class TestSupError:
    def test_trivial(self):
        t = np.linspace(0, 1, 5)
        tgt = IVTarget(t, t.copy())
        assert sup_error(QVSeries(t, t.copy(), 4, 0.0), tgt) == 0.0
        assert sup_error(QVSeries(t, t + 0.3, 4, 0.0), tgt) == pytest.approx(0.3)

    def test_step_left_limits(self):
        t = np.linspace(0, 1, 5)
        tgt = IVTarget(t, t.copy())
        # right-continuous step equal to the target at jumps still misses by one step
        assert sup_error(QVSeries(t, t.copy(), 4, 0.0, step=True), tgt) == pytest.approx(0.25)

    def test_grid_mismatch(self):
        with pytest.raises(GridError):
            sup_error(QVSeries([0, 1], [0, 1], 1, 0.0), IVTarget(np.array([0, 0.5]), np.array([0, 1])))

    def test_iv_target(self):
        tgt = iv_target("linear:1,0.5", [0.0, 1.0])
        assert tgt.values[0] == 0
        assert tgt.values[1] == pytest.approx((1.5**3 - 1) / 1.5)


class TestHelpers:
    def test_frequency_grid(self):
        g = frequency_grid(2.0, 8)
        assert g.n == 16 and g.T == 2.0
        with pytest.raises(ConfigError):
            frequency_grid(0.3, 5)

    def test_clt_statistic(self):
        p = _path(np.linspace(0, 1, 5))
        assert clt_statistic(p, 0.5, "const:1", 1.0) == pytest.approx(2 * (0.25 - 1))
