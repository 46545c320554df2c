"""Exact Gaussian simulation of fBm and of the fOU driver Y1.

Y1_t = int_0^t exp(-s) dB^H_{a_s} with a_s = H exp(s / H).  Its increments
are stationary, so on a uniform grid every second-order quantity reduces to
the variogram v(t) = E(Y1_t - Y1_0)^2 / 2 or, equivalently, to the
increment autocovariance sequence.

Two independent routes compute those quantities:

* kernel route (H > 1/2): v(t) = int_0^t (t - x) k_H(x) dx and increment
  covariances int int r_H, evaluated by quadrature;
* brute-force route (any H): the bilinear form of a Riemann-Stieltjes sum
  of exp(-s) against time-changed fBm increments, whose covariances are
  exact.

For H <= 1/2 only the brute-force route is used.
"""

from __future__ import annotations

import enum
import functools
import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import integrate, linalg

from .core import (
    ConfigError,
    FouqvError,
    GridError,
    HurstParam,
    RegimeError,
    SeedSpec,
    TimeGrid,
    as_hurst,
    as_seed,
    time_change,
    time_change_array,
)

CHOLESKY_BUDGET = 4096
REGULARIZATION = 1e-10
TIMECHANGE_REFINE = 16
BRUTEFORCE_SUBDIV = 512
ACOV_SUBDIV = 64

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(32)


class PSDError(FouqvError, np.linalg.LinAlgError):
    """Covariance matrix is indefinite beyond the regularization budget."""


class BudgetError(FouqvError):
    """Requested Cholesky problem exceeds the size budget."""


class Process(str, enum.Enum):
    FBM = "fbm"
    Y1 = "y1"


class Method(str, enum.Enum):
    CHOLESKY = "cholesky"
    CIRCULANT = "circulant"
    TIMECHANGE = "timechange"


@dataclass(frozen=True, eq=False)
class GaussianPath:
    grid: TimeGrid
    values: np.ndarray
    process: Process
    h: HurstParam
    method: Method
    seed: SeedSpec | None = None

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        if vals.shape != (len(self.grid),):
            raise ValueError("path values must have one entry per grid point")
        if vals[0] != 0.0:
            raise ValueError("Gaussian paths start at 0")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    @property
    def times(self) -> np.ndarray:
        return self.grid.points


# --------------------------------------------------------------------------
# covariance functions and kernels


def fbm_cov(h, s, t):
    """E[B_s B_t] = (s^2H + t^2H - |t - s|^2H) / 2."""
    h2 = 2.0 * as_hurst(h).h
    s = np.asarray(s, dtype=float)
    t = np.asarray(t, dtype=float)
    if np.any(s < 0) or np.any(t < 0):
        raise ConfigError("fBm covariance needs s, t >= 0")
    out = 0.5 * (s**h2 + t**h2 - np.abs(t - s) ** h2)
    return float(out) if out.ndim == 0 else out


def fgn_acov(h, nlags: int, step: float = 1.0) -> np.ndarray:
    """Autocovariance of fBm increments over steps of length ``step``, lags 0..nlags."""
    h2 = 2.0 * as_hurst(h).h
    k = np.arange(nlags + 1, dtype=float)
    rho = 0.5 * (np.abs(k + 1) ** h2 + np.abs(k - 1) ** h2 - 2.0 * k**h2)
    return step**h2 * rho


def _require_kernel_regime(h: HurstParam, what: str):
    if not h.kernel_regime_valid:
        raise RegimeError(
            f"{what} is only defined for H > 1/2 (got H={h.h}); "
            "use the brute-force route for H <= 1/2"
        )


def _kernel_prefactor(h: float) -> float:
    return h * (2.0 * h - 1.0) * h ** (2.0 * h - 2.0)


def kernel_k(h, x):
    """k_H(x) = H(2H-1) H^(2H-2) exp(-(1-H)x/H) |1 - exp(-x/H)|^(2H-2), x > 0."""
    hp = as_hurst(h)
    _require_kernel_regime(hp, "kernel k_H")
    H = hp.h
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0):
        raise ConfigError("k_H is evaluated at x > 0 only")
    out = (
        _kernel_prefactor(H)
        * np.exp(-(1.0 - H) * x / H)
        * (-np.expm1(-x / H)) ** (2.0 * H - 2.0)
    )
    return float(out) if out.ndim == 0 else out


def kernel_r(h, u, v):
    """Symmetric increment-covariance density r_H(u, v) = k_H(|u - v|)."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    if np.any(u == v):
        raise ConfigError("r_H is singular on the diagonal u = v")
    return kernel_k(h, np.abs(u - v))


# --------------------------------------------------------------------------
# variogram


def _variogram_quad(H: float, t: float) -> float:
    # y = x^(2H-1) absorbs the x^(2H-2) singularity: k(x) dx = g(x) dy / (2H-1)
    a = 2.0 * H - 1.0
    c = H ** (2.0 * H - 1.0)

    def integrand(y):
        if y <= 0.0:
            return c * t * H ** (2.0 - 2.0 * H)
        x = y ** (1.0 / a)
        ratio = -math.expm1(-x / H) / x
        return c * (t - x) * math.exp(-(1.0 - H) * x / H) * ratio ** (2.0 * H - 2.0)

    upper = t**a
    scale = 0.5 * t ** (2.0 * H)
    val, _ = integrate.quad(integrand, 0.0, upper, epsabs=1e-14 * scale,
                            epsrel=1e-12, limit=200)
    return val


@functools.lru_cache(maxsize=65536)
def _variogram_cached(H: float, t: float) -> float:
    return _variogram_quad(H, t)


def variogram(h, t):
    """v(t) = int_0^t (t - x) k_H(x) dx, half the variance of a Y1 increment of span t.

    Valid for H > 1/2 only; see :func:`y1_variogram` for a regime-dispatching
    version.  ``t`` may be an array; ``t = 0`` gives 0.
    """
    hp = as_hurst(h)
    _require_kernel_regime(hp, "the kernel variogram")
    t_arr = np.asarray(t, dtype=float)
    if np.any(t_arr < 0):
        raise ConfigError("variogram needs t >= 0")
    flat = [0.0 if ti == 0.0 else _variogram_cached(hp.h, float(ti)) for ti in t_arr.ravel()]
    out = np.array(flat).reshape(t_arr.shape)
    return float(out) if out.ndim == 0 else out


def _abs_diff_timechanged(H: float, s_p: np.ndarray, s_q: np.ndarray) -> np.ndarray:
    """|a(s_q) - a(s_p)| for all pairs, computed without cancellation."""
    lo = np.minimum(s_p[:, None], s_q[None, :])
    gap = np.abs(s_q[None, :] - s_p[:, None])
    return H * np.exp(lo / H) * np.expm1(gap / H)


def _timechanged_increment_cov(H: float, s_p: np.ndarray, s_q: np.ndarray) -> np.ndarray:
    """Cov(B_{a(s_p[i])} - B_{a(s_p[i-1])}, B_{a(s_q[j])} - B_{a(s_q[j-1])})."""
    P = _abs_diff_timechanged(H, s_p, s_q) ** (2.0 * H)
    return 0.5 * (P[:-1, 1:] + P[1:, :-1] - P[1:, 1:] - P[:-1, :-1])


def _midpoint_weights(s: np.ndarray) -> np.ndarray:
    return np.exp(-0.5 * (s[:-1] + s[1:]))


def variogram_bruteforce(h, t: float, subdiv: int = BRUTEFORCE_SUBDIV) -> float:
    """Half the variance of the Riemann-Stieltjes sum sum_i exp(-m_i) dB_{a_s}
    over ``subdiv`` equal cells of [0, t], m_i the cell midpoints.

    The fBm increment covariances are exact, so the only error is the
    midpoint discretisation of exp(-s), which is O((t/subdiv)^2).
    Valid for every H in (0, 1).
    """
    H = as_hurst(h).h
    if subdiv < 2:
        raise ConfigError("subdiv must be >= 2")
    if t < 0:
        raise ConfigError("variogram needs t >= 0")
    if t == 0:
        return 0.0
    time_change(H, t)
    s = np.linspace(0.0, t, subdiv + 1)
    G = _timechanged_increment_cov(H, s, s)
    w = _midpoint_weights(s)
    return 0.5 * float(w @ G @ w)


def y1_variogram(h, t, subdiv: int = BRUTEFORCE_SUBDIV):
    """Variogram of Y1 by the kernel route for H > 1/2, brute force otherwise."""
    hp = as_hurst(h)
    if hp.kernel_regime_valid:
        return variogram(hp, t)
    t_arr = np.asarray(t, dtype=float)
    out = np.array([variogram_bruteforce(hp, float(ti), subdiv) for ti in t_arr.ravel()])
    out = out.reshape(t_arr.shape)
    return float(out) if out.ndim == 0 else out


def variogram_route(h) -> str:
    return "quadrature" if as_hurst(h).kernel_regime_valid else "bruteforce"


# --------------------------------------------------------------------------
# Y1 increment autocovariance on a uniform grid


def _acov_kernel(H: float, step: float, nlags: int) -> np.ndarray:
    g = np.empty(nlags + 1)
    v1 = _variogram_cached(H, step)
    g[0] = 2.0 * v1
    if nlags >= 1:
        g[1] = _variogram_cached(H, 2.0 * step) - 2.0 * v1
    if nlags >= 2:
        # int_{-step}^{step} (step - |x|) k_H(k step + x) dx for k >= 2, away from the singularity
        k = np.arange(2, nlags + 1, dtype=float)
        z_lo = 0.5 * (_GL_NODES - 1.0)  # [-1, 0]
        z_hi = 0.5 * (_GL_NODES + 1.0)  # [0, 1]
        acc = np.zeros_like(k)
        for z, wt in ((z_lo, 1.0 + z_lo), (z_hi, 1.0 - z_hi)):
            x = (k[:, None] + z[None, :]) * step
            acc += 0.5 * (kernel_k(H, x) * wt[None, :]) @ _GL_WEIGHTS
        g[2:] = step * step * acc
    return g


def _acov_bruteforce(H: float, step: float, nlags: int, subdiv: int) -> np.ndarray:
    s0 = np.linspace(0.0, step, subdiv + 1)
    w0 = _midpoint_weights(s0)
    g = np.empty(nlags + 1)
    g[0] = float(w0 @ _timechanged_increment_cov(H, s0, s0) @ w0)
    if nlags == 0:
        return g
    # cell 0 against cell k: a(k step + s_q) - a(s_p) = a(s_p) expm1((k step + s_q - s_p)/H) >= 0
    lo = H * np.exp(s0 / H)
    rel = s0[None, :] - s0[:, None]
    chunk = max(1, 4_000_000 // (subdiv + 1) ** 2)
    ks = np.arange(1, nlags + 1, dtype=float)
    for start in range(0, ks.size, chunk):
        kk = ks[start:start + chunk]
        gap = kk[:, None, None] * step + rel[None, :, :]
        P = (lo[None, :, None] * np.expm1(np.maximum(gap, 0.0) / H)) ** (2.0 * H)
        G = 0.5 * (P[:, :-1, 1:] + P[:, 1:, :-1] - P[:, 1:, 1:] - P[:, :-1, :-1])
        wk = np.exp(-kk * step)[:, None] * w0[None, :]
        g[1 + start:1 + start + kk.size] = np.einsum("i,kij,kj->k", w0, G, wk)
    return g


@functools.lru_cache(maxsize=64)
def _acov_cached(H: float, step: float, nlags: int, subdiv: int) -> np.ndarray:
    if H > 0.5:
        g = _acov_kernel(H, step, nlags)
    else:
        time_change(H, (nlags + 1) * step)
        g = _acov_bruteforce(H, step, nlags, subdiv)
    g.setflags(write=False)
    return g


def y1_increment_acov(h, step: float, nlags: int, subdiv: int = ACOV_SUBDIV) -> np.ndarray:
    """Cov(Y1_step - Y1_0, Y1_{(k+1) step} - Y1_{k step}) for k = 0..nlags.

    Kernel route (double integral of r_H over the two cells) for H > 1/2,
    brute-force bilinear sums with ``subdiv`` cells per step otherwise.
    """
    H = as_hurst(h).h
    if not step > 0:
        raise ConfigError("step must be positive")
    return _acov_cached(H, float(step), int(nlags), int(subdiv))


# --------------------------------------------------------------------------
# covariance matrices


@dataclass(frozen=True, eq=False)
class CovMatrix:
    """Covariance of a Gaussian process on a grid.

    ``kind`` is ``"level"`` (entries indexed by grid points, row 0 is the
    zero row at t = 0) or ``"increment"`` (indexed by grid intervals).
    """

    matrix: np.ndarray
    process: Process
    h: HurstParam
    grid: TimeGrid
    kind: str = "level"

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=float)
        expected = len(self.grid) if self.kind == "level" else self.grid.n
        if m.shape != (expected, expected):
            raise ValueError(f"{self.kind} covariance must be {expected}x{expected}")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def size(self) -> int:
        return self.matrix.shape[0]

    def symmetry_error(self) -> float:
        return float(np.max(np.abs(self.matrix - self.matrix.T)))

    def min_eigenvalue(self) -> float:
        return float(linalg.eigvalsh(self.matrix, subset_by_index=[0, 0])[0])

    def psd_ok(self) -> bool:
        """Symmetric within 1e-12 and smallest eigenvalue >= -1e-8 trace / n."""
        n = self.size
        tol = 1e-8 * float(np.trace(self.matrix)) / n
        return self.symmetry_error() <= 1e-12 and self.min_eigenvalue() >= -tol

    def factor(self) -> tuple[np.ndarray, float]:
        """Lower Cholesky factor of the non-degenerate block and the jitter used."""
        cached = self.__dict__.get("_factor")
        if cached is None:
            cached = _cholesky(self._core())
            object.__setattr__(self, "_factor", cached)
        return cached

    def _core(self) -> np.ndarray:
        return self.matrix[1:, 1:] if self.kind == "level" else self.matrix


def _cholesky(m: np.ndarray) -> tuple[np.ndarray, float]:
    if m.shape[0] == 0:
        return m.copy(), 0.0
    live = np.diag(m) > 0
    if not live.all():
        # zero-variance coordinates are deterministic zeros; factor the rest
        if np.any(m[~live]) or np.any(m[:, ~live]):
            raise PSDError("zero diagonal entry with nonzero covariance")
        L = np.zeros_like(m)
        sub, lam = _cholesky(m[np.ix_(live, live)])
        L[np.ix_(live, live)] = sub
        return L, lam
    if m.shape[0] > CHOLESKY_BUDGET:
        raise BudgetError(
            f"Cholesky on {m.shape[0]} variables exceeds the budget of {CHOLESKY_BUDGET}; "
            "use the circulant sampler on uniform grids"
        )
    try:
        return np.linalg.cholesky(m), 0.0
    except np.linalg.LinAlgError:
        pass
    lam = REGULARIZATION * float(np.max(np.diag(m)))
    try:
        return np.linalg.cholesky(m + lam * np.eye(m.shape[0])), lam
    except np.linalg.LinAlgError:
        raise PSDError(
            f"covariance is not positive definite even after jitter {lam:.3g} "
            f"(1e-10 x max diagonal)"
        ) from None


def _toeplitz_levels(g: np.ndarray) -> np.ndarray:
    n = g.size
    inc = linalg.toeplitz(g)
    lev = np.zeros((n + 1, n + 1))
    lev[1:, 1:] = np.cumsum(np.cumsum(inc, axis=0), axis=1)
    return 0.5 * (lev + lev.T)


def _y1_level_from_variogram(hp: HurstParam, pts: np.ndarray) -> np.ndarray:
    diffs = np.abs(pts[:, None] - pts[None, :])
    uniq, inv = np.unique(np.concatenate([pts, diffs.ravel()]), return_inverse=True)
    vals = y1_variogram(hp, uniq)
    v_pts = vals[inv[: pts.size]]
    v_diff = vals[inv[pts.size:]].reshape(diffs.shape)
    return v_pts[:, None] + v_pts[None, :] - v_diff


def build_cov_matrix(process, h, grid: TimeGrid) -> CovMatrix:
    """Level covariance of fBm or Y1 at the grid points."""
    process = Process(process)
    hp = as_hurst(h)
    pts = grid.points
    if process is Process.FBM:
        m = fbm_cov(hp, pts[:, None], pts[None, :])
    elif grid.uniform:
        g = y1_increment_acov(hp, grid.step, grid.n - 1)
        m = _toeplitz_levels(g)
    else:
        time_change(hp, grid.T)
        m = _y1_level_from_variogram(hp, pts)
    return CovMatrix(m, process, hp, grid, "level")


def increment_cov_matrix(process, h, grid: TimeGrid) -> CovMatrix:
    """Covariance of the increments over consecutive grid intervals."""
    process = Process(process)
    hp = as_hurst(h)
    if grid.uniform:
        if process is Process.FBM:
            g = fgn_acov(hp, grid.n - 1, grid.step)
        else:
            g = y1_increment_acov(hp, grid.step, grid.n - 1)
        return CovMatrix(linalg.toeplitz(g), process, hp, grid, "increment")
    lev = build_cov_matrix(process, hp, grid).matrix
    D = np.diff(np.diff(lev, axis=0), axis=1)
    return CovMatrix(0.5 * (D + D.T), process, hp, grid, "increment")


# --------------------------------------------------------------------------
# samplers


def _path_from_draw(cov: CovMatrix, x: np.ndarray) -> np.ndarray:
    lead = np.zeros(x.shape[:-1] + (1,))
    if cov.kind == "increment":
        x = np.cumsum(x, axis=-1)
    return np.concatenate([lead, x], axis=-1)


def sample_cholesky(cov: CovMatrix, seed, method: Method = Method.CHOLESKY) -> GaussianPath:
    """One zero-mean Gaussian path with covariance ``cov``; deterministic in ``seed``."""
    seed = as_seed(seed)
    L, _ = cov.factor()
    z = seed.generator().standard_normal(L.shape[0])
    values = _path_from_draw(cov, L @ z)
    return GaussianPath(cov.grid, values, cov.process, cov.h, method, seed)


def sample_cholesky_many(cov: CovMatrix, seed, n_paths: int) -> np.ndarray:
    """``n_paths`` independent paths as rows, all drawn from one stream."""
    L, _ = cov.factor()
    z = as_seed(seed).generator().standard_normal((n_paths, L.shape[0]))
    return _path_from_draw(cov, z @ L.T)


def circulant_sqrt_eigenvalues(acov: np.ndarray, tol: float = 1e-12):
    """sqrt(lambda / 2n) for the minimal circulant embedding of acov[0..n].

    Returns None when the embedding has an eigenvalue below
    ``-tol * max(lambda)`` (not nonnegative definite).
    """
    n = acov.size - 1
    row = np.concatenate([acov, acov[-2:0:-1]])
    lam = np.fft.rfft(row).real
    lam = np.concatenate([lam, lam[-2:0:-1]])
    if lam.min() < -tol * lam.max():
        return None
    return np.sqrt(np.clip(lam, 0.0, None) / (2 * n))


def _circulant_draw(sqrt_eig: np.ndarray, rng: np.random.Generator, n: int) -> np.ndarray:
    m = sqrt_eig.size
    z = rng.standard_normal(m) + 1j * rng.standard_normal(m)
    return np.fft.fft(sqrt_eig * z).real[:n]


@functools.lru_cache(maxsize=64)
def _fgn_plan(H: float, step: float, n: int):
    return circulant_sqrt_eigenvalues(fgn_acov(H, n, step))


def sample_fbm_circulant(h, grid: TimeGrid, seed) -> GaussianPath:
    """fBm on a uniform grid by circulant embedding of its increments (Davies-Harte)."""
    hp = as_hurst(h)
    seed = as_seed(seed)
    if not grid.uniform:
        raise GridError("the circulant sampler needs a uniform grid")
    sq = _fgn_plan(hp.h, grid.step, grid.n)
    if sq is None:
        warnings.warn("circulant embedding is not nonnegative definite; falling back to Cholesky")
        return sample_cholesky(build_cov_matrix(Process.FBM, hp, grid), seed)
    inc = _circulant_draw(sq, seed.generator(), grid.n)
    values = np.concatenate([[0.0], np.cumsum(inc)])
    return GaussianPath(grid, values, Process.FBM, hp, Method.CIRCULANT, seed)


@functools.lru_cache(maxsize=64)
def _y1_plan(H: float, step: float, n: int):
    return circulant_sqrt_eigenvalues(np.asarray(y1_increment_acov(H, step, n)))


def _refined_points(grid: TimeGrid, refine: int) -> np.ndarray:
    pts = grid.points
    frac = np.arange(refine) / refine
    fine = (pts[:-1, None] + np.diff(pts)[:, None] * frac[None, :]).ravel()
    return np.concatenate([fine, [pts[-1]]])


@functools.lru_cache(maxsize=8)
def _y1_exact_cov(H: float, grid: TimeGrid) -> CovMatrix:
    return build_cov_matrix(Process.Y1, H, grid)


@functools.lru_cache(maxsize=8)
def _timechange_plan(H: float, grid: TimeGrid, refine: int):
    s = _refined_points(grid, refine)
    G = _timechanged_increment_cov(H, s, s)
    L, _ = _cholesky(0.5 * (G + G.T))
    return L, _midpoint_weights(s)


def sample_y1(h, grid: TimeGrid, seed, route: str = "auto",
              refine: int = TIMECHANGE_REFINE) -> GaussianPath:
    """One path of Y1 on ``grid``.

    Routes:

    ``"exact"``
        Cholesky of the level covariance (H > 1/2, at most 4096 points).
    ``"circulant"``
        circulant embedding of the stationary increment sequence on a
        uniform grid (any H); falls back to ``"exact"`` when the embedding
        is not nonnegative definite.
    ``"timechange"``
        fBm sampled exactly at the time-changed points a_s of a grid
        ``refine`` times finer, then the midpoint Riemann-Stieltjes sum of
        exp(-s) dB_{a_s}, kept at the grid points.
    ``"auto"``
        circulant on uniform grids, exact otherwise (timechange for H <= 1/2).
    """
    hp = as_hurst(h)
    seed = as_seed(seed)
    if route == "auto":
        if grid.uniform:
            route = "circulant"
        else:
            route = "exact" if hp.kernel_regime_valid else "timechange"
    if route == "exact":
        _require_kernel_regime(hp, "the exact-covariance route for Y1")
        return sample_cholesky(_y1_exact_cov(hp.h, grid), seed)
    if route == "circulant":
        if not grid.uniform:
            raise GridError("the circulant route needs a uniform grid")
        time_change(hp, grid.T)
        sq = _y1_plan(hp.h, grid.step, grid.n)
        if sq is None:
            warnings.warn("Y1 circulant embedding is not nonnegative definite; using Cholesky")
            return sample_y1(hp, grid, seed, "exact")
        inc = _circulant_draw(sq, seed.generator(), grid.n)
        values = np.concatenate([[0.0], np.cumsum(inc)])
        return GaussianPath(grid, values, Process.Y1, hp, Method.CIRCULANT, seed)
    if route == "timechange":
        if int(refine) != refine or refine < 1:
            raise ConfigError("refine must be a positive integer")
        time_change(hp, grid.T)
        L, w = _timechange_plan(hp.h, grid, int(refine))
        dB = L @ seed.generator().standard_normal(L.shape[0])
        fine = np.concatenate([[0.0], np.cumsum(w * dB)])
        values = fine[:: int(refine)]
        return GaussianPath(grid, values, Process.Y1, hp, Method.TIMECHANGE, seed)
    raise ConfigError(f"unknown Y1 route {route!r}")


def sample_fbm(h, grid: TimeGrid, seed, route: str = "auto") -> GaussianPath:
    if route == "auto":
        route = "circulant" if grid.uniform else "cholesky"
    if route == "circulant":
        return sample_fbm_circulant(h, grid, seed)
    if route in ("cholesky", "exact"):
        return sample_cholesky(build_cov_matrix(Process.FBM, h, grid), seed)
    raise ConfigError(f"unknown fBm route {route!r}")


# --------------------------------------------------------------------------
# diagnostics


def rowsum_diagnostic(cov: CovMatrix) -> float:
    """max_j sum_k |E(D_k D_j)| over increment covariances."""
    if cov.kind != "increment":
        raise ConfigError("the row-sum diagnostic needs an increment covariance")
    return float(np.max(np.sum(np.abs(cov.matrix), axis=1)))


def rowsum_bound(cov: CovMatrix) -> float:
    """max_j d(t_j, t_{j-1}) + mesh^(1 ∧ 2H), the reference bound for the row sums."""
    if cov.kind != "increment":
        raise ConfigError("the row-sum bound needs an increment covariance")
    return float(np.max(np.diag(cov.matrix))) + cov.grid.mesh ** min(1.0, 2.0 * cov.h.h)
