"""Shared domain types: Hurst parameter, time grids, seeds, volatility functions.

Everything here is immutable after construction. The time change
``a_t = H exp(t / H)`` used to build the second-kind fOU driver lives here
because every simulation route needs it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy import integrate


class FouqvError(Exception):
    """Base class for all library errors."""


class ConfigError(FouqvError, ValueError):
    """Invalid parameters or cross-field constraint violation."""


class RegimeError(ConfigError):
    """Operation is not defined for the requested Hurst regime."""


class RegularityError(ConfigError):
    """Hölder orders are too small for Young integration."""


class TimeChangeOverflow(FouqvError, OverflowError):
    """exp(t / H) is not representable in double precision."""


class GridError(FouqvError, ValueError):
    """Grid is not of the required form (e.g. non-uniform input data)."""


# H outside this window is rejected at config-parse time.
H_PARSE_MIN = 0.01
H_PARSE_MAX = 0.99

_EXP_MAX = math.log(np.finfo(float).max)


@dataclass(frozen=True)
class HurstParam:
    h: float

    def __post_init__(self):
        h = float(self.h)
        if not (0.0 < h < 1.0) or not math.isfinite(h):
            raise ConfigError(f"Hurst parameter must satisfy 0 < H < 1, got {self.h!r}")
        object.__setattr__(self, "h", h)

    @classmethod
    def parse(cls, value) -> "HurstParam":
        """Build from user input; rejects H outside [0.01, 0.99]."""
        try:
            h = float(value)
        except (TypeError, ValueError):
            raise ConfigError(f"H must be a number, got {value!r}") from None
        if not (H_PARSE_MIN <= h <= H_PARSE_MAX):
            raise ConfigError(
                f"H must lie in [{H_PARSE_MIN}, {H_PARSE_MAX}] (0 < H < 1 with "
                f"numerically safe margins), got {h}"
            )
        return cls(h)

    @property
    def long_memory(self) -> bool:
        return self.h > 0.5

    @property
    def kernel_regime_valid(self) -> bool:
        # the k_H / r_H kernels carry (2H - 1) and an integrable singularity only for H > 1/2
        return self.h > 0.5

    @property
    def regime(self) -> str:
        if self.h < 0.5:
            return "rough"
        if self.h == 0.5:
            return "brownian"
        return "smooth"

    def __float__(self) -> float:
        return self.h


def as_hurst(h) -> HurstParam:
    return h if isinstance(h, HurstParam) else HurstParam(h)


@dataclass(frozen=True, eq=False)
class TimeGrid:
    """Ordered sample times on [0, T].

    ``n`` is the number of subintervals; ``uniform`` is set only by
    :func:`make_uniform_grid` or when the points pass the uniformity check.
    """

    points: np.ndarray
    uniform: bool = False

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim != 1 or pts.size < 2:
            raise GridError("a grid needs at least two points")
        if pts[0] != 0.0:
            raise GridError("grid must start at t = 0")
        if not np.all(np.diff(pts) > 0):
            raise GridError("grid points must be strictly increasing")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    @property
    def T(self) -> float:
        return float(self.points[-1])

    @property
    def n(self) -> int:
        return self.points.size - 1

    @property
    def mesh(self) -> float:
        return float(np.max(np.diff(self.points)))

    @property
    def step(self) -> float:
        if not self.uniform:
            raise GridError("step is only defined on uniform grids")
        return self.T / self.n

    @property
    def frequency(self) -> float:
        """Samples per unit time, n / T, for uniform grids."""
        return self.n / self.T if self.uniform else math.nan

    def __len__(self) -> int:
        return self.points.size

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, TimeGrid)
            and self.uniform == other.uniform
            and np.array_equal(self.points, other.points)
        )

    def __hash__(self) -> int:
        return hash((self.uniform, self.points.tobytes()))

    def to_dict(self) -> dict:
        if self.uniform:
            return {"uniform": True, "T": self.T, "n": self.n}
        return {"uniform": False, "points": self.points.tolist()}


def make_uniform_grid(T: float, n: int) -> TimeGrid:
    if int(n) != n or n < 1:
        raise ConfigError(f"grid needs n >= 1 subintervals, got {n!r}")
    if not (T > 0) or not math.isfinite(T):
        raise ConfigError(f"grid horizon must be T > 0, got {T!r}")
    n = int(n)
    pts = np.arange(n + 1, dtype=float) * (T / n)
    pts[-1] = T
    return TimeGrid(pts, uniform=True)


def grid_from_points(points: Sequence[float], rtol: float = 1e-9) -> TimeGrid:
    """Wrap arbitrary points, flagging the grid uniform when spacing is constant."""
    pts = np.asarray(points, dtype=float)
    grid = TimeGrid(pts)
    T, n = grid.T, grid.n
    ideal = np.arange(n + 1) * (T / n)
    if np.max(np.abs(pts - ideal)) <= rtol * max(T, 1.0):
        return TimeGrid(ideal if n else pts, uniform=True)
    return grid


def time_change(h, t: float) -> float:
    """a_t = H exp(t / H)."""
    h = as_hurst(h).h
    if t < 0:
        raise ConfigError(f"time change needs t >= 0, got {t}")
    x = t / h
    if x > _EXP_MAX:
        raise TimeChangeOverflow(
            f"a_t = H exp(t/H) overflows for t={t}, H={h}; horizon too long for the time change"
        )
    return h * math.exp(x)


def time_change_array(h, t) -> np.ndarray:
    h = as_hurst(h).h
    t = np.asarray(t, dtype=float)
    if t.size and np.max(t) / h > _EXP_MAX:
        raise TimeChangeOverflow(
            f"a_t = H exp(t/H) overflows for t={np.max(t)}, H={h}"
        )
    return h * np.exp(t / h)


def inverse_time_change(h, v: float) -> float:
    """Inverse of :func:`time_change`: H log(v / H)."""
    h = as_hurst(h).h
    if not (v >= h):
        raise ConfigError(f"inverse time change needs v >= H = {h}, got {v}")
    return h * math.log(v / h)


@dataclass(frozen=True)
class SeedSpec:
    """Identity of one random stream.

    The generator is PCG64 seeded by ``SeedSequence(base_seed,
    spawn_key=(*stream, replication_index))``.  Distinct indices (or stream
    tags) give independent streams, and a replication's stream does not
    depend on which other replications ran or in what order.
    """

    base_seed: int
    replication_index: int = 0
    stream: tuple = ()

    def __post_init__(self):
        if int(self.base_seed) != self.base_seed or not (0 <= self.base_seed < 2**64):
            raise ConfigError(f"base_seed must be an integer in [0, 2**64), got {self.base_seed!r}")
        if int(self.replication_index) != self.replication_index or self.replication_index < 0:
            raise ConfigError(f"replication_index must be >= 0, got {self.replication_index!r}")
        object.__setattr__(self, "base_seed", int(self.base_seed))
        object.__setattr__(self, "replication_index", int(self.replication_index))
        object.__setattr__(self, "stream", tuple(int(s) for s in self.stream))

    def generator(self) -> np.random.Generator:
        ss = np.random.SeedSequence(
            self.base_seed, spawn_key=(*self.stream, self.replication_index)
        )
        return np.random.Generator(np.random.PCG64(ss))

    def replicate(self, index: int) -> "SeedSpec":
        return SeedSpec(self.base_seed, index, self.stream)

    def substream(self, *tags: int) -> "SeedSpec":
        return SeedSpec(self.base_seed, self.replication_index, self.stream + tuple(tags))

    def to_dict(self) -> dict:
        d = {"base_seed": self.base_seed, "replication_index": self.replication_index}
        if self.stream:
            d["stream"] = list(self.stream)
        return d


def as_seed(seed) -> SeedSpec:
    if isinstance(seed, SeedSpec):
        return seed
    return SeedSpec(int(seed))


_CLOSED_FORMS = ("constant", "linear", "sine", "holder")


@dataclass(frozen=True, eq=False)
class VolatilityFn:
    """Deterministic volatility / integrand s -> sigma_s.

    Kinds and parameters:

    * ``constant``: ``c``
    * ``linear``: ``a + b s``
    * ``sine``: ``a + b sin(omega s)``
    * ``holder``: ``a + b |s - s0|**beta`` (Hölder of order exactly ``beta``)
    * ``tabulated``: piecewise-linear through ``(times, values)`` with a
      declared Hölder order

    ``beta`` is the declared Hölder order in (0, 1].
    """

    kind: str
    params: tuple = ()
    beta: float = 1.0
    times: np.ndarray | None = field(default=None, repr=False)
    values: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        if self.kind not in _CLOSED_FORMS + ("tabulated",):
            raise ConfigError(f"unknown volatility kind {self.kind!r}")
        if not (0.0 < self.beta <= 1.0):
            raise ConfigError(f"declared Hölder order must be in (0, 1], got {self.beta}")
        need = {"constant": 1, "linear": 2, "sine": 3, "holder": 3, "tabulated": 0}[self.kind]
        if len(self.params) != need:
            raise ConfigError(f"{self.kind} volatility takes {need} parameters, got {len(self.params)}")
        object.__setattr__(self, "params", tuple(float(p) for p in self.params))
        if self.kind == "tabulated":
            t = np.asarray(self.times, dtype=float)
            v = np.asarray(self.values, dtype=float)
            if t.ndim != 1 or t.shape != v.shape or t.size < 2 or np.any(np.diff(t) <= 0):
                raise ConfigError("tabulated volatility needs increasing times and matching values")
            object.__setattr__(self, "times", t)
            object.__setattr__(self, "values", v)

    @classmethod
    def constant(cls, c: float = 1.0) -> "VolatilityFn":
        return cls("constant", (c,), beta=1.0)

    @classmethod
    def linear(cls, a: float, b: float) -> "VolatilityFn":
        return cls("linear", (a, b), beta=1.0)

    @classmethod
    def sine(cls, a: float, b: float, omega: float) -> "VolatilityFn":
        return cls("sine", (a, b, omega), beta=1.0)

    @classmethod
    def holder(cls, a: float, b: float, s0: float, beta: float) -> "VolatilityFn":
        return cls("holder", (a, b, s0), beta=beta)

    @classmethod
    def tabulated(cls, times, values, beta: float) -> "VolatilityFn":
        return cls("tabulated", (), beta=beta, times=times, values=values)

    @classmethod
    def parse(cls, spec) -> "VolatilityFn":
        """Parse ``"const:1"``, ``"linear:1,0.5"``, ``"sine:1,0.3,6.28"``,
        ``"holder:1,0.5,0.3;beta=0.7"`` or an equivalent JSON dict."""
        if isinstance(spec, VolatilityFn):
            return spec
        if isinstance(spec, (int, float)):
            return cls.constant(spec)
        if isinstance(spec, dict):
            d = dict(spec)
            kind = d.pop("kind")
            if kind == "tabulated":
                return cls.tabulated(d["times"], d["values"], d["beta"])
            beta = d.pop("beta", 1.0)
            return cls(kind, tuple(d.get("params", ())), beta=beta)
        text = str(spec).strip()
        kind, _, rest = text.partition(":")
        kind = {"const": "constant"}.get(kind, kind)
        beta = 1.0
        if ";" in rest:
            rest, _, opt = rest.partition(";")
            key, _, val = opt.partition("=")
            if key.strip() != "beta":
                raise ConfigError(f"unknown volatility option {key!r}")
            beta = float(val)
        try:
            params = tuple(float(x) for x in rest.split(",") if x.strip())
        except ValueError:
            raise ConfigError(f"cannot parse volatility descriptor {text!r}") from None
        if kind in ("constant", "linear", "sine") and beta != 1.0:
            raise ConfigError(f"{kind} volatility is Lipschitz; beta is fixed at 1")
        return cls(kind, params, beta=beta)

    def to_dict(self) -> dict:
        if self.kind == "tabulated":
            return {"kind": "tabulated", "beta": self.beta,
                    "times": self.times.tolist(), "values": self.values.tolist()}
        return {"kind": self.kind, "params": list(self.params), "beta": self.beta}

    def __call__(self, s):
        s = np.asarray(s, dtype=float)
        p = self.params
        if self.kind == "constant":
            return np.full_like(s, p[0])
        if self.kind == "linear":
            return p[0] + p[1] * s
        if self.kind == "sine":
            return p[0] + p[1] * np.sin(p[2] * s)
        if self.kind == "holder":
            return p[0] + p[1] * np.abs(s - p[2]) ** self.beta
        return np.interp(s, self.times, self.values)

    @property
    def is_zero(self) -> bool:
        return self.kind == "constant" and self.params[0] == 0.0

    def scaled(self, c: float) -> "VolatilityFn":
        """c * sigma, same regularity."""
        p = self.params
        if self.kind == "constant":
            return VolatilityFn.constant(c * p[0])
        if self.kind == "linear":
            return VolatilityFn.linear(c * p[0], c * p[1])
        if self.kind == "sine":
            return VolatilityFn.sine(c * p[0], c * p[1], p[2])
        if self.kind == "holder":
            return VolatilityFn.holder(c * p[0], c * p[1], p[2], self.beta)
        return VolatilityFn.tabulated(self.times, c * self.values, self.beta)

    def power_integral(self, t, power: int = 2):
        """int_0^t |sigma_s|**power ds, vectorised over t."""
        t_arr = np.atleast_1d(np.asarray(t, dtype=float))
        if self.kind == "constant":
            out = abs(self.params[0]) ** power * t_arr
        elif self.kind == "linear" and power in (2, 4):
            a, b = self.params
            if b == 0.0:
                out = abs(a) ** power * t_arr
            else:
                out = ((a + b * t_arr) ** (power + 1) - a ** (power + 1)) / ((power + 1) * b)
        else:
            out = self._quad_power_integral(t_arr, power)
        return out if np.ndim(t) else float(out[0])

    def _quad_power_integral(self, t_arr, power):
        f = lambda s: abs(float(self(s))) ** power
        breaks = None
        if self.kind == "tabulated":
            breaks = self.times
        elif self.kind == "holder":
            breaks = np.array([self.params[2]])
        order = np.argsort(t_arr)
        out = np.empty_like(t_arr)
        acc, prev = 0.0, 0.0
        for i in order:
            ti = t_arr[i]
            pts = None
            if breaks is not None:
                inside = breaks[(breaks > prev) & (breaks < ti)]
                pts = inside.tolist() or None
            if ti > prev:
                val, _ = integrate.quad(f, prev, ti, points=pts, limit=200,
                                        epsabs=1e-13, epsrel=1e-11)
                acc += val
            out[i] = acc
            prev = max(prev, ti)
        return out

    def sup_norm(self, T: float) -> float:
        s = np.linspace(0.0, T, 4097)
        extra = []
        if self.kind == "tabulated":
            extra = self.times[(self.times >= 0) & (self.times <= T)]
        return float(np.max(np.abs(self(np.concatenate([s, extra])))))
