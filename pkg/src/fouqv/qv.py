"""Realized quadratic variation and the integrated-volatility estimator.

V_n(Z)_t = sum_{i=1}^{[nt]} (Z_{i/n} - Z_{(i-1)/n})^2 for a path sampled at
frequency n, and QV_n(X)_t = n^(2H-1) V_n(X)_t.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import ConfigError, GridError, TimeGrid, VolatilityFn, as_hurst, make_uniform_grid

# slack for n*t landing a hair below an integer when t = i/n in floating point
_FLOOR_SLACK = 1e-9


@dataclass(frozen=True, eq=False)
class QVSeries:
    """Scaled quadratic variation evaluated at ``times``.

    ``step=True`` marks a series evaluated at its own jump times, so the
    sup-norm distance to a continuous target also checks left limits.
    """

    times: np.ndarray
    values: np.ndarray
    n: int
    scale_exponent: float
    step: bool = False

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        v = np.asarray(self.values, dtype=float)
        if t.shape != v.shape:
            raise ValueError("times and values must align")
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "values", v)


@dataclass(frozen=True, eq=False)
class IVTarget:
    times: np.ndarray
    values: np.ndarray


def _path_arrays(path):
    grid = path.grid
    if not grid.uniform:
        raise GridError("realized variation needs a path on a uniform grid")
    freq = grid.n / grid.T
    n = round(freq)
    if n < 1 or abs(freq - n) > 1e-9 * max(freq, 1.0):
        raise GridError(
            f"grid with {grid.n} steps on [0, {grid.T}] is not sampled at an integer frequency"
        )
    return n, np.asarray(path.values, dtype=float)


def _increment_index(n: int, t, m: int):
    k = np.floor(np.asarray(t, dtype=float) * n + _FLOOR_SLACK).astype(int)
    if np.any(k < 0) or np.any(k > m):
        raise ConfigError("evaluation time outside [0, T]")
    return k


def _cumulative_v(values: np.ndarray) -> np.ndarray:
    return np.concatenate([[0.0], np.cumsum(np.diff(values) ** 2)])


def v_n(path, t):
    """Sum of squared increments Z_{i/n} - Z_{(i-1)/n} for i = 1..floor(n t).

    ``n`` is the sampling frequency of the path's uniform grid.  ``t = i/n``
    includes the i-th increment.
    """
    n, vals = _path_arrays(path)
    cum = _cumulative_v(vals)
    out = cum[_increment_index(n, t, vals.size - 1)]
    return float(out) if np.ndim(out) == 0 else out


def sampling_frequency(path) -> int:
    return _path_arrays(path)[0]


def scaled_qv(path, h, t):
    """n^(2H-1) V_n(path)_t."""
    H = as_hurst(h).h
    n = sampling_frequency(path)
    return float(n) ** (2.0 * H - 1.0) * v_n(path, t)


def qv_estimator(x, h, eval_times=None) -> QVSeries:
    """QV_n(X)_t = n^(2H-1) V_n(X)_t on ``eval_times``.

    Without ``eval_times`` the estimator is evaluated at its own jump times
    {i/n} (which include T) and flagged as a step function.
    """
    H = as_hurst(h).h
    n, vals = _path_arrays(x)
    scale = float(n) ** (2.0 * H - 1.0)
    cum = _cumulative_v(vals)
    if eval_times is None:
        t = np.asarray(x.grid.points)
        return QVSeries(t, scale * cum, n, 2.0 * H - 1.0, step=True)
    t = eval_times.points if isinstance(eval_times, TimeGrid) else np.asarray(eval_times, float)
    k = _increment_index(n, t, vals.size - 1)
    return QVSeries(t, scale * cum[k], n, 2.0 * H - 1.0)


def iv_target(sigma, times) -> IVTarget:
    """Integrated volatility int_0^t |sigma_s|^2 ds at ``times``."""
    sigma = VolatilityFn.parse(sigma)
    t = times.points if isinstance(times, TimeGrid) else np.asarray(times, float)
    return IVTarget(t, np.asarray(sigma.power_integral(t, 2), dtype=float).reshape(t.shape))


def sup_error(est: QVSeries, target: IVTarget) -> float:
    """max_t |est - target| on the shared evaluation grid.

    For a step series the left limit at each jump, est(t_{i-1}) against
    target(t_i), is included, since a piecewise-constant estimate against an
    increasing target peaks at one of the two ends of each step.
    """
    if est.times.shape != target.times.shape or not np.allclose(
        est.times, target.times, rtol=0.0, atol=1e-12
    ):
        raise GridError("estimator and target are evaluated on different grids")
    err = np.abs(est.values - target.values)
    out = float(err.max())
    if est.step and est.values.size > 1:
        out = max(out, float(np.max(np.abs(est.values[:-1] - target.values[1:]))))
    return out


def clt_statistic(x, h, sigma, t) -> float:
    """sqrt(n) (QV_n(X)_t - int_0^t sigma^2 ds)."""
    n = sampling_frequency(x)
    iv = VolatilityFn.parse(sigma).power_integral(t, 2)
    return math.sqrt(n) * (scaled_qv(x, h, t) - iv)


def frequency_grid(T: float, n: int) -> TimeGrid:
    """Uniform grid {i/n : 0 <= i <= nT}; nT must be an integer."""
    steps = n * T
    if abs(steps - round(steps)) > 1e-9 * max(steps, 1.0) or round(steps) < 1:
        raise ConfigError(f"n * T must be a positive integer, got n={n}, T={T}")
    return make_uniform_grid(T, int(round(steps)))
