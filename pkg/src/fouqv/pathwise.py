"""Pathwise calculus on sampled paths: Young integrals, p-variation, Hölder
seminorms and the fOU SDE driven by Y1.

All integrals are left-point Riemann-Stieltjes sums on the sampling grid.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import signal

from .core import ConfigError, RegularityError, TimeGrid, VolatilityFn
from .gaussian import GaussianPath


class PathTag(str, enum.Enum):
    Z_INTEGRAL = "z_integral"
    X_SDE = "x_sde"
    DRIFT = "drift"


@dataclass(frozen=True, eq=False)
class ProcessPath:
    grid: TimeGrid
    values: np.ndarray
    tag: PathTag
    provenance: dict = field(default_factory=dict)

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        if vals.shape != (len(self.grid),):
            raise ValueError("path values must have one entry per grid point")
        if not np.all(np.isfinite(vals)):
            raise ValueError("process path has non-finite values")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    @property
    def times(self) -> np.ndarray:
        return self.grid.points


@dataclass(frozen=True)
class VariationResult:
    p: float
    value: float
    partition: tuple


def _times_values(f, times=None):
    if hasattr(f, "grid") and hasattr(f, "values"):
        return np.asarray(f.grid.points), np.asarray(f.values, dtype=float)
    vals = np.asarray(f, dtype=float)
    if times is None:
        times = np.linspace(0.0, 1.0, vals.size)
    return np.asarray(times, dtype=float), vals


def young_epsilon(beta: float, h: float) -> float:
    """Hölder-exponent slack used in the Young regularity checks.

    min(beta/4, H/4), shrunk if needed so that beta + H - eps > 1 still holds.
    """
    eps = min(beta / 4.0, h / 4.0)
    if beta + h > 1.0:
        eps = min(eps, 0.5 * (beta + h - 1.0))
    return eps


def check_young_regularity(beta: float, h: float) -> float:
    if beta + h <= 1.0:
        raise RegularityError(
            f"Young integration needs beta + H > 1; got beta={beta}, H={h}"
        )
    return young_epsilon(beta, h)


def _left_sums(u, u_vals: np.ndarray, y_vals: np.ndarray) -> np.ndarray:
    """Cumulative left-point sums of u dy, starting at 0."""
    if isinstance(u, VolatilityFn) and u.kind == "constant":
        # the sum telescopes; exact rather than a rounded cumulative sum
        return u.params[0] * (y_vals - y_vals[0])
    return np.concatenate([[0.0], np.cumsum(u_vals[:-1] * np.diff(y_vals))])


def young_integral(u, y: GaussianPath, grid: TimeGrid | None = None,
                   beta: float | None = None) -> ProcessPath:
    """Z_t = int_0^t u_s dy_s by left-point sums on the driver's grid.

    ``u`` is a :class:`VolatilityFn`, a :class:`ProcessPath` on the same
    grid, or an array of values at the grid points.  For the last two a
    Hölder order ``beta`` must be declared.
    """
    if grid is not None and grid != y.grid:
        raise ConfigError("integrand and driver must share the sampling grid")
    grid = y.grid
    if isinstance(u, VolatilityFn):
        beta = u.beta if beta is None else beta
        u_vals = u(grid.points)
        desc = u.to_dict()
    else:
        if beta is None:
            raise ConfigError("declare the Hölder order beta of a sampled integrand")
        _, u_vals = _times_values(u)
        if u_vals.shape != (len(grid),):
            raise ConfigError("sampled integrand is not aligned to the driver grid")
        desc = {"kind": "sampled", "beta": beta}
    check_young_regularity(beta, y.h.h)
    z = _left_sums(u, u_vals, y.values)
    prov = {"driver": y.process.value, "h": y.h.h, "volatility": desc}
    if y.seed is not None:
        prov["seed"] = y.seed.to_dict()
    return ProcessPath(grid, z, PathTag.Z_INTEGRAL, prov)


def riemann_zeta(s: float) -> float:
    """zeta(s) for s > 1: 100 direct terms plus an Euler-Maclaurin tail.

    The neglected remainder is below s(s+1)(s+2)(s+3)(s+4)/30240 * 100^-(s+5),
    i.e. under 1e-12 for s <= 3.
    """
    if not s > 1.0:
        raise ConfigError(f"zeta(s) needs s > 1, got {s}")
    N = 100
    head = math.fsum(k ** -s for k in range(1, N))
    tail = (
        N ** (1.0 - s) / (s - 1.0)
        + 0.5 * N**-s
        + s * N ** (-s - 1.0) / 12.0
        - s * (s + 1.0) * (s + 2.0) * N ** (-s - 3.0) / 720.0
    )
    return head + tail


def young_error_bound(p: float, q: float, varp: float, varq: float) -> float:
    """zeta(1/p + 1/q) * var_p(f) * var_q(g), the Young-Loève constant times the variations."""
    s = 1.0 / p + 1.0 / q
    if s <= 1.0:
        raise ConfigError(f"Young's bound needs 1/p + 1/q > 1, got {s}")
    if varp == 0.0 or varq == 0.0:
        return 0.0
    return riemann_zeta(s) * varp * varq


def p_variation(f, p: float) -> VariationResult:
    """Largest sum_i |f(t_i) - f(t_{i-1})|^p over partitions made of sample points.

    O(n^2) dynamic programme; ``value`` is the p-th root of the optimal sum
    and ``partition`` the indices of a maximising partition.  This is a lower
    bound for the p-variation of the underlying continuous path.
    """
    if p < 1:
        raise ConfigError(f"p-variation needs p >= 1, got {p}")
    _, x = _times_values(f)
    n = x.size
    if n < 2:
        return VariationResult(p, 0.0, tuple(range(n)))
    # normalise by the range so |increment|^p neither underflows nor overflows
    scale = float(np.max(x) - np.min(x))
    if scale == 0.0 or not math.isfinite(scale):
        if scale == 0.0:
            return VariationResult(p, 0.0, (0, n - 1))
        scale = 1.0
    x = x / scale
    best = np.zeros(n)
    prev = np.zeros(n, dtype=int)
    for j in range(1, n):
        cand = best[:j] + np.abs(x[j] - x[:j]) ** p
        i = int(np.argmax(cand))
        best[j] = cand[i]
        prev[j] = i
    path = [n - 1]
    while path[-1] != 0:
        path.append(int(prev[path[-1]]))
    return VariationResult(p, scale * float(best[-1] ** (1.0 / p)), tuple(reversed(path)))


def holder_seminorm(f, alpha: float, times=None) -> float:
    """max over sample pairs of |f(t) - f(s)| / |t - s|^alpha."""
    if not (0.0 < alpha <= 1.0):
        raise ConfigError(f"Hölder order must be in (0, 1], got {alpha}")
    t, x = _times_values(f, times)
    if x.size < 2:
        raise ConfigError("Hölder seminorm needs at least two points")
    out = 0.0
    for i in range(x.size - 1):
        r = np.abs(x[i + 1:] - x[i]) / (t[i + 1:] - t[i]) ** alpha
        out = max(out, float(r.max()))
    return out


def solve_fou2(theta: float, sigma, x0: float, y: GaussianPath):
    """dX = -theta X dt + sigma_t dY1_t with X_0 = x0.

    Exponential Euler: X_i = exp(-theta dt) X_{i-1} + sigma_{t_{i-1}} dY_i.
    Returns ``(X, D)`` where D_t = X_t - x0 - sum sigma dY is the drift part.
    """
    if theta < 0:
        raise ConfigError(f"theta must be >= 0, got {theta}")
    sigma = VolatilityFn.parse(sigma)
    grid = y.grid
    t = grid.points
    sig_vals = sigma(t)
    stoch = _left_sums(sigma, sig_vals, y.values)
    decay = np.exp(-theta * np.diff(t))
    noise = sig_vals[:-1] * np.diff(y.values)
    # S = X - x0 obeys S_i = decay S_{i-1} + noise_i + (decay - 1) x0
    forcing = noise + (decay - 1.0) * x0
    if theta == 0.0:
        s = stoch[1:]
    elif grid.uniform:
        s = signal.lfilter([1.0], [1.0, -decay[0]], forcing)
    else:
        s = np.empty(forcing.size)
        acc = 0.0
        for i in range(forcing.size):
            acc = decay[i] * acc + forcing[i]
            s[i] = acc
    x = x0 + np.concatenate([[0.0], s])
    if theta == 0.0:
        drift = np.zeros_like(x)
    else:
        drift = x - x0 - stoch
        drift[0] = 0.0
    prov = {"driver": y.process.value, "h": y.h.h, "volatility": sigma.to_dict(),
            "theta": theta, "x0": x0}
    if y.seed is not None:
        prov["seed"] = y.seed.to_dict()
    return (ProcessPath(grid, x, PathTag.X_SDE, prov),
            ProcessPath(grid, drift, PathTag.DRIFT, prov))
