"""Monte Carlo experiments for the consistency and stable-CLT results.

Every replication draws its randomness from ``SeedSpec(base_seed, r,
stream=(experiment tag, ...))``, so replications can run in any order or in
parallel; aggregation always reduces in replication-index order.  Reports
serialise byte-identically for identical configurations.
"""

from __future__ import annotations

import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, fields
from typing import Callable, Sequence

import numpy as np
from scipy import special, stats

from . import __version__
from .core import (
    ConfigError,
    HurstParam,
    RegimeError,
    SeedSpec,
    VolatilityFn,
    as_hurst,
    time_change,
)
from .gaussian import sample_y1
from .pathwise import check_young_regularity, solve_fou2
from .qv import frequency_grid, iv_target, qv_estimator, scaled_qv, sup_error

# stream tags keep the experiments' random streams disjoint
STREAM_CONSISTENCY = 1
STREAM_CLT = 2
STREAM_CALIBRATION = 3
STREAM_VARIANCE = 4
STREAM_MIXED = 5

CLT_H_MAX = 0.75
KS_LEVEL = 0.01
MIXED_NORMAL_TOL = 0.25
VARIANCE_BENCHMARK_TOL = 0.15


@dataclass(frozen=True)
class CLTSample:
    replication: int
    raw: float
    standardized: float
    raw_half: float = math.nan


@dataclass
class ExperimentReport:
    kind: str
    config: dict
    results: dict
    verdicts: dict
    seeds: dict
    samples: list = field(default_factory=list)
    timings: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(self.verdicts.values())

    def to_dict(self) -> dict:
        return {
            "experiment": self.kind,
            "config": self.config,
            "results": self.results,
            "verdicts": self.verdicts,
            "passed": self.passed,
            "seeds": self.seeds,
            "tool_version": __version__,
        }

    def to_json(self) -> str:
        # timings stay out so reruns are byte-identical
        return json.dumps(_clean(self.to_dict()), sort_keys=True, indent=2) + "\n"


def _clean(obj):
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        x = float(obj)
        return x if math.isfinite(x) else None
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


# --------------------------------------------------------------------------
# configs


def _check_common(h: float, T: float, replications: int, base_seed: int):
    HurstParam.parse(h)
    if not T > 0:
        raise ConfigError(f"T must be positive, got {T}")
    time_change(h, T)
    if int(replications) != replications or replications < 1:
        raise ConfigError(f"replication count R must be >= 1, got {replications}")
    SeedSpec(base_seed)


@dataclass(frozen=True)
class ConsistencyConfig:
    h: float
    sigma: VolatilityFn = field(default_factory=VolatilityFn.constant)
    theta: float = 0.0
    x0: float = 0.0
    T: float = 1.0
    n_ladder: tuple = tuple(2**k for k in range(8, 15))
    replications: int = 100
    base_seed: int = 0
    route: str = "auto"

    def validate(self) -> "ConsistencyConfig":
        _check_common(self.h, self.T, self.replications, self.base_seed)
        if self.theta < 0:
            raise ConfigError(f"theta must be >= 0, got {self.theta}")
        if not self.n_ladder or any(int(n) != n or n < 1 for n in self.n_ladder):
            raise ConfigError("n_ladder must be a non-empty list of positive integers")
        if list(self.n_ladder) != sorted(set(self.n_ladder)):
            raise ConfigError("n_ladder must be strictly increasing")
        for n in self.n_ladder:
            frequency_grid(self.T, n)
        if not self.sigma.is_zero:
            check_young_regularity(self.sigma.beta, self.h)
        return self

    def to_dict(self) -> dict:
        d = {f.name: getattr(self, f.name) for f in fields(self)}
        d["sigma"] = self.sigma.to_dict()
        d["n_ladder"] = list(self.n_ladder)
        return d


@dataclass(frozen=True)
class CLTConfig:
    h: float
    sigma: VolatilityFn = field(default_factory=VolatilityFn.constant)
    theta: float = 0.0
    x0: float = 0.0
    T: float = 1.0
    n: int = 2**12
    replications: int = 500
    calibration_replications: int = 2000
    base_seed: int = 0
    mixed_normal_scales: tuple = (1.0, math.sqrt(2.0))
    route: str = "auto"

    def validate(self) -> "CLTConfig":
        _check_common(self.h, self.T, self.replications, self.base_seed)
        if self.h >= CLT_H_MAX:
            raise RegimeError(
                f"the CLT for the volatility estimator assumes 0 < H < 3/4; got H={self.h}"
            )
        need = max(1.0 - self.h, 0.5)
        if not self.sigma.beta > need:
            raise ConfigError(
                f"CLT needs sigma Hölder of order beta > max(1 - H, 1/2) = {need}; "
                f"got beta={self.sigma.beta}"
            )
        if self.replications < 300:
            raise ConfigError(f"CLT experiment needs R >= 300, got {self.replications}")
        if self.calibration_replications < 300:
            raise ConfigError("calibration needs at least 300 replications")
        if self.theta < 0:
            raise ConfigError(f"theta must be >= 0, got {self.theta}")
        frequency_grid(self.T, self.n)
        frequency_grid(self.T / 2, self.n)
        if any(not s > 0 for s in self.mixed_normal_scales):
            raise ConfigError("mixed-normal scales must be positive")
        return self

    def to_dict(self) -> dict:
        d = {f.name: getattr(self, f.name) for f in fields(self)}
        d["sigma"] = self.sigma.to_dict()
        d["mixed_normal_scales"] = list(self.mixed_normal_scales)
        return d


@dataclass(frozen=True)
class VarianceConstantConfig:
    h: float
    n: int = 2**12
    replications: int = 2000
    base_seed: int = 0
    route: str = "auto"

    def validate(self) -> "VarianceConstantConfig":
        _check_common(self.h, 1.0, self.replications, self.base_seed)
        if self.replications < 4:
            raise ConfigError("variance-constant experiment needs R >= 4")
        frequency_grid(1.0, self.n)
        return self

    def to_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}


# --------------------------------------------------------------------------
# replication fan-out


def run_replications(fn: Callable, indices: Sequence[int], workers: int = 1) -> dict:
    """Evaluate ``fn(i)`` for each index; returns {index: result}.

    With ``workers > 1`` the calls run in a process pool; ``fn`` must then be
    picklable.  Results never depend on the execution order.
    """
    indices = list(indices)
    if workers and workers > 1 and len(indices) > 1:
        chunk = max(1, len(indices) // (4 * workers))
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(fn, indices, chunksize=chunk))
    else:
        results = [fn(i) for i in indices]
    return dict(zip(indices, results))


def _ordered(results: dict, R: int) -> list:
    missing = [r for r in range(R) if r not in results]
    if missing:
        raise RuntimeError(f"replications {missing[:5]} did not complete; report withheld")
    return [results[r] for r in range(R)]


@dataclass(frozen=True)
class _ConsistencyTask:
    cfg: ConsistencyConfig
    n: int

    def __call__(self, r: int) -> dict:
        cfg = self.cfg
        seed = SeedSpec(cfg.base_seed, r, (STREAM_CONSISTENCY, self.n))
        grid = frequency_grid(cfg.T, self.n)
        y = sample_y1(cfg.h, grid, seed, route=cfg.route)
        x, _ = solve_fou2(cfg.theta, cfg.sigma, cfg.x0, y)
        est = qv_estimator(x, cfg.h)
        target = iv_target(cfg.sigma, est.times)
        x_sup = float(np.max(np.abs(x.values)))
        qv_T = float(est.values[-1])
        return {
            "sup_error": sup_error(est, target),
            "qv_T": qv_T,
            "bias_T": qv_T - float(target.values[-1]),
            "x_sup": x_sup,
            "drift_bound": cfg.T * cfg.theta**2 * x_sup**2 * float(self.n) ** (2 * cfg.h - 2),
        }


def run_consistency(config: ConsistencyConfig, workers: int = 1,
                    order: Sequence[int] | None = None) -> ExperimentReport:
    """Sup-norm error of QV_n(X) against int sigma^2 over an n-ladder.

    Per n: median, 90th percentile and max of the sup error over R
    replications, the sup error of replication 0 (a single path), and the
    mean bias at T with its standard error.  Verdicts: the median decreases
    strictly along the ladder; with sigma = 0, additionally
    QV_n(X)_T <= T theta^2 ||X||^2 n^(2H-2) for every replication.
    """
    cfg = config.validate()
    R = cfg.replications
    idx = list(order) if order is not None else list(range(R))
    if sorted(idx) != list(range(R)):
        raise ConfigError("order must be a permutation of range(R)")
    ladder, samples, timings = [], [], {}
    drift_ok = True
    for n in cfg.n_ladder:
        t0 = time.perf_counter()
        rows = _ordered(run_replications(_ConsistencyTask(cfg, n), idx, workers), R)
        timings[f"n={n}"] = time.perf_counter() - t0
        errs = np.array([row["sup_error"] for row in rows])
        bias = np.array([row["bias_T"] for row in rows])
        ladder.append({
            "n": n,
            "median_sup_error": float(np.median(errs)),
            "p90_sup_error": float(np.quantile(errs, 0.9)),
            "max_sup_error": float(errs.max()),
            "single_path_sup_error": float(errs[0]),
            "mean_bias_T": float(bias.mean()),
            "bias_se_T": float(bias.std(ddof=1) / math.sqrt(R)) if R > 1 else math.nan,
        })
        for r, row in enumerate(rows):
            samples.append({"replication": r, "n": n, "sup_error": row["sup_error"],
                            "qv_T": row["qv_T"]})
            if cfg.sigma.is_zero and not row["qv_T"] <= row["drift_bound"]:
                drift_ok = False
    medians = [row["median_sup_error"] for row in ladder]
    verdicts = {"median_decreasing": all(b < a for a, b in zip(medians, medians[1:]))}
    if cfg.sigma.is_zero:
        verdicts["drift_bound"] = drift_ok
    return ExperimentReport(
        "consistency", cfg.to_dict(), {"ladder": ladder}, verdicts,
        {"base_seed": cfg.base_seed, "stream": [STREAM_CONSISTENCY, "n"],
         "replications": R},
        samples, timings,
    )


# --------------------------------------------------------------------------
# CLT


def fbm_variance_benchmark(h) -> float:
    """2 sum_{r in Z} rho_H(r)^2 for fractional Gaussian noise; inf for H >= 3/4.

    Direct sum up to |r| < 1000, then the tail from the expansion
    rho_H(r) = sum_k C(2H, 2k) r^(2H-2k) summed with Hurwitz zeta values;
    the truncation error is far below 1e-10.
    """
    H = as_hurst(h).h
    if H >= 0.75:
        return math.inf
    N = 1000
    r = np.arange(1, N, dtype=float)
    rho = 0.5 * ((r + 1) ** (2 * H) + (r - 1) ** (2 * H) - 2 * r ** (2 * H))
    head = 1.0 + 2.0 * math.fsum(rho**2)
    K = 8
    b = [special.binom(2 * H, 2 * k) for k in range(1, K + 1)]
    tail = 0.0
    for i in range(K):
        for j in range(K):
            s = 2 * (i + 1) + 2 * (j + 1) - 4 * H
            tail += b[i] * b[j] * special.zeta(s, N)
    return float(2.0 * (head + 2.0 * tail))


@dataclass(frozen=True)
class _CLTTask:
    h: float
    sigma: VolatilityFn
    theta: float
    x0: float
    T: float
    n: int
    base_seed: int
    stream: tuple
    route: str

    def __call__(self, r: int) -> tuple:
        seed = SeedSpec(self.base_seed, r, self.stream)
        grid = frequency_grid(self.T, self.n)
        y = sample_y1(self.h, grid, seed, route=self.route)
        x, _ = solve_fou2(self.theta, self.sigma, self.x0, y)
        rn = math.sqrt(self.n)
        half = self.T / 2
        raw = rn * (scaled_qv(x, self.h, self.T) - self.sigma.power_integral(self.T, 2))
        raw_half = rn * (scaled_qv(x, self.h, half) - self.sigma.power_integral(half, 2))
        return raw, raw_half


def _clt_raw(h, sigma, theta, x0, T, n, R, base_seed, stream, route, workers, order=None):
    task = _CLTTask(h, sigma, theta, x0, T, n, base_seed, tuple(stream), route)
    idx = list(order) if order is not None else list(range(R))
    rows = _ordered(run_replications(task, idx, workers), R)
    return np.array([a for a, _ in rows]), np.array([b for _, b in rows])


def _variance_with_se(x: np.ndarray) -> tuple[float, float]:
    R = x.size
    s2 = float(np.var(x, ddof=1))
    m4 = float(np.mean((x - x.mean()) ** 4))
    se = math.sqrt(max(m4 - s2 * s2 * (R - 3) / (R - 1), 0.0) / R)
    return s2, se


def estimate_variance_constant(h, n: int, R: int, seed, route: str = "auto",
                               workers: int = 1) -> float:
    """Empirical variance of sqrt(n) (QV_n(Y1)_1 - 1) over R replications (sigma = 1, T = 1)."""
    seed = seed if isinstance(seed, SeedSpec) else SeedSpec(int(seed))
    raw, _ = _clt_raw(as_hurst(h).h, VolatilityFn.constant(1.0), 0.0, 0.0, 1.0, n, R,
                      seed.base_seed, seed.stream or (STREAM_CALIBRATION,), route, workers)
    return float(np.var(raw, ddof=1))


def ks_distance(sample, cdf: Callable | None = None) -> tuple[float, float]:
    """One-sample Kolmogorov-Smirnov distance to ``cdf`` (standard normal by
    default) and its asymptotic p-value from the Kolmogorov series."""
    x = np.sort(np.asarray(sample, dtype=float))
    N = x.size
    if N == 0:
        raise ConfigError("KS distance needs a non-empty sample")
    F = (cdf or stats.norm.cdf)(x)
    i = np.arange(1, N + 1)
    d = float(max(np.max(i / N - F), np.max(F - (i - 1) / N)))
    rn = math.sqrt(N)
    return d, kolmogorov_sf((rn + 0.12 + 0.11 / rn) * d)


def kolmogorov_sf(lam: float, terms: int = 40) -> float:
    """P(K > lam) for the Kolmogorov distribution."""
    if lam <= 0:
        return 1.0
    if lam < 1.18:
        # Jacobi-transformed series converges fast for small lambda
        c = math.pi**2 / (8.0 * lam * lam)
        s = math.fsum(math.exp(-((2 * k - 1) ** 2) * c) for k in range(1, terms + 1))
        return min(1.0, max(0.0, 1.0 - math.sqrt(2.0 * math.pi) / lam * s))
    s = math.fsum((-1) ** (k - 1) * math.exp(-2.0 * k * k * lam * lam)
                  for k in range(1, terms + 1))
    return min(1.0, max(0.0, 2.0 * s))


def run_clt(config: CLTConfig, workers: int = 1,
            order: Sequence[int] | None = None) -> ExperimentReport:
    """Standardised CLT statistic sqrt(n)(QV_n(X)_T - int_0^T sigma^2) at t = T.

    The statistic is divided by sqrt(c_H int_0^T sigma^4), c_H estimated from
    an independent calibration batch.  Verdicts: one-sample KS against N(0, 1)
    at level 0.01; the two-time ratio Cov(S_T, S_{T/2}) / Var(S_{T/2}) within
    four standard errors of 1; and the slope of mean squared raw statistics
    against int sigma^4 across rescaled volatilities within 25% of c_H.
    """
    cfg = config.validate()
    timings = {}
    t0 = time.perf_counter()
    c_hat = estimate_variance_constant(
        cfg.h, cfg.n, cfg.calibration_replications,
        SeedSpec(cfg.base_seed, 0, (STREAM_CALIBRATION,)), cfg.route, workers,
    )
    timings["calibration"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    raw, raw_half = _clt_raw(cfg.h, cfg.sigma, cfg.theta, cfg.x0, cfg.T, cfg.n,
                             cfg.replications, cfg.base_seed, (STREAM_CLT,), cfg.route,
                             workers, order)
    timings["main"] = time.perf_counter() - t0
    quart = cfg.sigma.power_integral(cfg.T, 4)
    std = raw / math.sqrt(c_hat * quart)
    d, p = ks_distance(std)
    raw_var, raw_var_se = _variance_with_se(raw)

    # two-time structure: regression slope of S_T on S_{T/2}
    hc = raw_half - raw_half.mean()
    slope = float(np.dot(hc, raw - raw.mean()) / np.dot(hc, hc))
    resid = (raw - raw.mean()) - slope * hc
    slope_se = float(math.sqrt(np.dot(resid, resid) / (raw.size - 2) / np.dot(hc, hc)))

    t0 = time.perf_counter()
    mixed = []
    for k, scale in enumerate(cfg.mixed_normal_scales):
        sig = cfg.sigma.scaled(scale)
        if scale == 1.0:
            r_k = raw
        else:
            r_k, _ = _clt_raw(cfg.h, sig, cfg.theta, cfg.x0, cfg.T, cfg.n, cfg.replications,
                              cfg.base_seed, (STREAM_MIXED, k), cfg.route, workers)
        q_k = sig.power_integral(cfg.T, 4)
        mixed.append({"scale": scale, "int_sigma4": q_k,
                      "mean_raw_sq": float(np.mean(r_k**2)),
                      "ratio_to_c_hat": float(np.mean(r_k**2) / (c_hat * q_k))})
    timings["mixed_normal"] = time.perf_counter() - t0
    xs = np.array([m["int_sigma4"] for m in mixed])
    ys = np.array([m["mean_raw_sq"] for m in mixed])
    mixed_slope = float(np.dot(xs, ys) / np.dot(xs, xs))

    results = {
        "c_hat": c_hat,
        "fbm_benchmark": fbm_variance_benchmark(cfg.h),
        "int_sigma4": quart,
        "raw_variance": raw_var,
        "raw_variance_se": raw_var_se,
        "raw_variance_over_c_hat_sigma4": raw_var / (c_hat * quart),
        "raw_mean": float(raw.mean()),
        "ks_distance": d,
        "ks_p_value": p,
        "two_time_ratio": slope,
        "two_time_ratio_se": slope_se,
        "mixed_normal": mixed,
        "mixed_normal_slope": mixed_slope,
        "mixed_normal_slope_over_c_hat": mixed_slope / c_hat,
    }
    verdicts = {
        "ks_normal": p >= KS_LEVEL,
        "two_time_ratio": abs(slope - 1.0) <= 4.0 * slope_se,
        "mixed_normal_slope": abs(mixed_slope / c_hat - 1.0) <= MIXED_NORMAL_TOL,
    }
    samples = [CLTSample(r, float(raw[r]), float(std[r]), float(raw_half[r]))
               for r in range(raw.size)]
    return ExperimentReport(
        "clt", cfg.to_dict(), results, verdicts,
        {"base_seed": cfg.base_seed,
         "streams": {"main": [STREAM_CLT], "calibration": [STREAM_CALIBRATION],
                     "mixed_normal": [STREAM_MIXED, "k"]},
         "replications": cfg.replications,
         "calibration_replications": cfg.calibration_replications},
        samples, timings,
    )


def run_variance_constant(config: VarianceConstantConfig, workers: int = 1) -> ExperimentReport:
    """c_H from two disjoint seed batches, compared with each other and with
    the fBm benchmark 2 sum rho_H(r)^2."""
    cfg = config.validate()
    half = cfg.replications // 2
    t0 = time.perf_counter()
    batches = []
    for b in (0, 1):
        raw, _ = _clt_raw(cfg.h, VolatilityFn.constant(1.0), 0.0, 0.0, 1.0, cfg.n, half,
                          cfg.base_seed, (STREAM_VARIANCE, b), cfg.route, workers)
        batches.append(raw)
    elapsed = time.perf_counter() - t0
    (va, sa), (vb, sb) = _variance_with_se(batches[0]), _variance_with_se(batches[1])
    pooled, pooled_se = _variance_with_se(np.concatenate(batches))
    bench = fbm_variance_benchmark(cfg.h)
    rel = pooled / bench - 1.0 if math.isfinite(bench) else math.nan
    results = {
        "c_hat": pooled, "c_hat_se": pooled_se,
        "batch_c_hat": [va, vb], "batch_se": [sa, sb],
        "fbm_benchmark": bench, "relative_difference": rel,
    }
    verdicts = {
        "seed_batches_agree": abs(va - vb) <= 2.0 * math.hypot(sa, sb),
        "benchmark_within_15pct": math.isfinite(bench) and abs(rel) <= VARIANCE_BENCHMARK_TOL,
    }
    samples = [{"batch": b, "replication": r, "raw": float(x)}
               for b in (0, 1) for r, x in enumerate(batches[b])]
    return ExperimentReport(
        "variance-constant", cfg.to_dict(), results, verdicts,
        {"base_seed": cfg.base_seed, "streams": [[STREAM_VARIANCE, 0], [STREAM_VARIANCE, 1]],
         "replications_per_batch": half},
        samples, {"total": elapsed},
    )
