"""Independent reference implementations used by the tests.

Nothing here imports the package: exponent formulas are written out branch
by branch in (s, t) rather than in reciprocals, harmonics come from SciPy,
and integrals use quadratures on grids the package never builds.
"""

from __future__ import annotations

import math

import numpy as np
from scipy import special

INF = math.inf


# --------------------------------------------------------------------------
# exponents, one function per displayed branch


def kappa_high(n, s):
    """t > sn/(s+n): 4s/(2s − (3n−2)), with s = ∞ giving 2."""
    return 2.0 if s == INF else 4 * s / (2 * s - (3 * n - 2))


def kappa_low(n, s, t):
    """t ≤ sn/(s+n): 4t/((5 − 2/n)t − (3n−2))."""
    return 4 * t / ((5 - 2 / n) * t - (3 * n - 2))


def mu_t_ge_s(n, s):
    return 2 / 3 if s == INF else 4 * s / (6 * s - (3 * n - 2))


def mu_mid(n, s, t):
    """sn/(s+n) < t < s: 4st/(6st + (n+2)t − 4ns)."""
    return 4 * s * t / (6 * s * t + (n + 2) * t - 4 * n * s)


def mu_low(n, t):
    return 4 * t / ((5 - 2 / n) * t - (3 * n - 2))


def mu_v_high(n, t):
    return 2 / 3 if t == INF else 4 * t / (6 * t - (3 * n - 2))


def pq_case1(s):
    return (2.0 if s == INF else 2 * s / (s + 2)), 2.0


def pq_case3(n, t):
    return 2 * n * t / (2 * n - 2 * t + n * t), 2 * n / (n - 2)


def beta_pair(n, p, q):
    c = (3 * n - 2) * (2 - p) / (8 * p)
    return 1.5 - c - n * (q - 2) / (2 * q), 0.5 - c


def pi_v_high(n, t):
    return 4 / 3 if t == INF else 4 * (2 * t - n) / (6 * t - (3 * n - 2))


# --------------------------------------------------------------------------
# spherical harmonics via SciPy (complex, Condon-Shortley phase removed)


def real_Y(k: int, m: int, points: np.ndarray) -> np.ndarray:
    pts = np.asarray(points, float)
    theta = np.arccos(np.clip(pts[:, 2], -1, 1))
    az = np.arctan2(pts[:, 1], pts[:, 0])
    Y = special.sph_harm_y(k, abs(m), theta, az) * (-1) ** abs(m)
    if m == 0:
        return Y.real
    return math.sqrt(2) * (Y.real if m > 0 else Y.imag)


def normalized_legendre(k: int, m: int, x: np.ndarray) -> np.ndarray:
    """√((2k+1)/4π · (k−m)!/(k+m)!) P_k^m(x) without the (−1)^m phase."""
    norm = math.sqrt((2 * k + 1) / (4 * math.pi) * math.exp(math.lgamma(k - m + 1) - math.lgamma(k + m + 1)))
    return norm * special.lpmv(m, k, x) * (-1) ** m


# --------------------------------------------------------------------------
# quadratures


def sphere_rule(nodes: int):
    """Gauss in cos θ × uniform azimuth; exact to degree 2·nodes − 1."""
    x, w = np.polynomial.legendre.leggauss(nodes)
    az = 2 * math.pi * np.arange(2 * nodes) / (2 * nodes)
    ct = np.repeat(x, az.size)
    st = np.sqrt(1 - ct * ct)
    a = np.tile(az, x.size)
    pts = np.stack([st * np.cos(a), st * np.sin(a), ct], axis=1)
    return pts, np.repeat(w, az.size) * math.pi / nodes


def radial_rule(lo: float, hi: float, panels: int = 60, nodes: int = 8):
    """Composite Gauss-Legendre in r over geometric panels."""
    x, w = np.polynomial.legendre.leggauss(nodes)
    edges = np.geomspace(lo, hi, panels + 1)
    a, b = edges[:-1, None], edges[1:, None]
    return (0.5 * (b - a) * x + 0.5 * (a + b)).ravel(), (0.5 * (b - a) * w).ravel()


def cartesian_log_measure_norm(evaluate, lo: float, hi: float, sphere_nodes: int, seed: int = 0) -> float:
    """(∫_{lo<|x|<hi} |u|² |x|^{−3} dx)^{1/2} on a randomly rotated sphere rule."""
    r, wr = radial_rule(lo, hi)
    pts, ws = sphere_rule(sphere_nodes)
    rot = np.linalg.qr(np.random.default_rng(seed).normal(size=(3, 3)))[0]
    X = r[:, None, None] * (pts @ rot.T)[None]
    vals = np.abs(evaluate(X)) ** 2
    return math.sqrt(float(np.sum((wr / r)[:, None] * ws[None, :] * vals)))


def fd_laplacian(fn, points: np.ndarray, h: np.ndarray) -> np.ndarray:
    """Fourth-order 13-point Cartesian Laplacian."""
    pts = np.asarray(points, float)
    hh = np.asarray(h, float)[..., None]
    acc = -7.5 * fn(pts)  # 3 axes × (−30/12)
    for j in range(3):
        e = np.zeros(3)
        e[j] = 1.0
        acc = acc + (16 * (fn(pts + hh * e) + fn(pts - hh * e)) - (fn(pts + 2 * hh * e) + fn(pts - 2 * hh * e))) / 12.0
    return acc / np.asarray(h, float) ** 2


def kernel_tau0(t: np.ndarray, s0: float, k: int) -> np.ndarray:
    """Solution of (∂_t − k)u = δ(t − s0) that vanishes as t → +∞: −e^{k(t−s0)} for t < s0."""
    return np.where(t < s0, -np.exp(k * (t - s0)), 0.0)


# --------------------------------------------------------------------------
# misc closed forms


def k0_closed(r0, r1, R1):
    def ph(r):
        L = math.log(r)
        return L + math.log(L * L)

    return (ph(R1 / 2) - ph(r1)) / (ph(R1 / 2) - ph(r0))


def ball_volume(r):
    return 4 * math.pi * r**3 / 3
