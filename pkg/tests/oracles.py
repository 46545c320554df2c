"""Reference values computed by routes independent of the package code."""

import itertools
import math

import numpy as np
from scipy import integrate


def lamperti_rho(H, tau):
    """Autocovariance of the stationary Lamperti process U_s = e^{-s} B_{a_s}."""
    return H ** (2 * H) * (math.cosh(tau) - 0.5 * (2 * math.sinh(tau / (2 * H))) ** (2 * H))


def lamperti_variogram(H, t):
    """v(t) = E(Y_t - Y_0)^2 / 2 via integration by parts.

    Y_t = e^{-t} B_{a_t} - B_{a_0} + int_0^t U_s ds, expanded in rho; valid for
    every H in (0, 1), no kernel involved.
    """
    if t == 0:
        return 0.0
    a = 0.5 * H ** (2 * H) * (2 * math.sinh(t / (2 * H))) ** (2 * H)
    b = -2 * H ** (2 * H) * math.sinh(t / 2) ** 2
    c, _ = integrate.quad(lambda s: (t - s) * lamperti_rho(H, s), 0.0, t,
                          epsabs=1e-15, epsrel=1e-13, limit=200)
    return a + b + c


def fbm_cov_direct(H, s, t):
    return 0.5 * (s ** (2 * H) + t ** (2 * H) - abs(t - s) ** (2 * H))


def exhaustive_p_variation(x, p):
    """Max over all subsets of interior points; exponential in len(x)."""
    n = len(x)
    best = 0.0
    interior = range(1, n - 1)
    for k in range(n - 1):
        for sub in itertools.combinations(interior, k):
            idx = (0, *sub, n - 1)
            s = sum(abs(x[j] - x[i]) ** p for i, j in zip(idx, idx[1:]))
            best = max(best, s)
    return best


def brownian_qv_variance(n, T=1.0):
    """Var(sqrt(n)(sum (dW)^2 - T)) = 2T exactly for Brownian W on {i/n}."""
    return 2.0 * T


def lamperti_increment_cov(H, a, b, c, d):
    """E[(Y_b - Y_a)(Y_d - Y_c)] from the variogram combination."""
    v = lambda x: lamperti_variogram(H, abs(x))
    return v(d - a) + v(c - b) - v(d - b) - v(c - a)


def y1_level_cov(H, pts):
    pts = np.asarray(pts, dtype=float)
    v = np.array([lamperti_variogram(H, abs(x)) for x in pts])
    m = np.empty((pts.size, pts.size))
    for i, s in enumerate(pts):
        for j, t in enumerate(pts):
            m[i, j] = v[i] + v[j] - lamperti_variogram(H, abs(t - s))
    return m


def fgn_rho_squared_sum(H, N=10**7):
    """2 sum_{r in Z} rho_H(r)^2 by brute force to N plus a leading-order tail.

    For r >= 1000 rho is replaced by its two-term expansion to avoid
    cancellation; the tail beyond N uses the first term only.
    """
    from scipy import special
    r = np.arange(1, N, dtype=float)
    rho = 0.5 * ((r + 1) ** (2 * H) + (r - 1) ** (2 * H) - 2 * r ** (2 * H))
    big = r >= 1000
    b1, b2 = special.binom(2 * H, 2), special.binom(2 * H, 4)
    rho[big] = b1 * r[big] ** (2 * H - 2) + b2 * r[big] ** (2 * H - 4)
    tail = b1**2 * special.zeta(4 - 4 * H, N)
    return 2.0 * (1.0 + 2.0 * (math.fsum(rho**2) + tail))
