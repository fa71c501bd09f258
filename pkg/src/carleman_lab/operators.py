"""First-order factorization of the log-polar Laplacian and the L⁻_τ solver.

On degree-k harmonics  Λ = k + (n−2)/2,  L± = ∂_t + (n−2)/2 ± Λ,  so
L⁻ = ∂_t − k,  L⁺ = ∂_t + (k+n−2)  and  e^{2t}Δ = L⁺L⁻ = L⁻L⁺.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import DomainError, KernelOverflow
from .kernels import kernel_decay_excess, kernel_solve
from .spectral import (
    Field,
    HarmonicSpectrum,
    TGrid,
    as_spectrum,
    dvarphi,
    synthesize,
    varphi,
)

# --------------------------------------------------------------------------
# finite differences in t: centered stencils of even order with one-sided
# closures of matching width near the ends

FD_ORDER = 8


@lru_cache(maxsize=None)
def _fd_weights(offsets: tuple, deriv: int) -> np.ndarray:
    off = np.asarray(offsets, dtype=float)
    V = np.vander(off, increasing=True).T  # row j: offsets**j
    rhs = np.zeros(len(off))
    rhs[deriv] = math.factorial(deriv)
    return np.linalg.solve(V, rhs)


def _apply_fd(values: np.ndarray, h: float, deriv: int, order: int) -> np.ndarray:
    if order % 2 or order < 4:
        raise ValueError("finite-difference order must be even and ≥ 4")
    v = np.asarray(values)
    nt = v.shape[0]
    half = order // 2
    width = order + 1 if deriv == 1 else order + 2
    if nt < width + 1:
        raise ValueError("t-grid too short for the requested stencil")
    central = _fd_weights(tuple(range(-half, half + 1)), deriv)
    out = np.zeros_like(v)
    for j, c in enumerate(central):
        out[half:nt - half] += c * v[j:nt - 2 * half + j]
    for i in range(half):
        w = _fd_weights(tuple(range(-i, width - i)), deriv)
        out[i] = np.tensordot(w, v[:width], axes=(0, 0))
        out[nt - 1 - i] = np.tensordot(w, v[::-1][:width], axes=(0, 0)) * (-1) ** deriv
    return out / h**deriv


def d_dt(values: np.ndarray, h: float, order: int | None = None) -> np.ndarray:
    return _apply_fd(values, h, 1, order or FD_ORDER)


def d2_dt2(values: np.ndarray, h: float, order: int | None = None) -> np.ndarray:
    return _apply_fd(values, h, 2, order or FD_ORDER)


# --------------------------------------------------------------------------
# spectral multipliers


def lambda_eigenvalue(k, n: int = 3):
    return np.asarray(k) + (n - 2) / 2.0


def laplace_beltrami_eigenvalue(k, n: int = 3):
    k = np.asarray(k)
    return k * (k + n - 2.0)


def _l_multiplier(spec: HarmonicSpectrum, sign: int) -> np.ndarray:
    lam = lambda_eigenvalue(spec.degrees, spec.n)
    return (spec.n - 2) / 2.0 + sign * lam


def _sign(sign) -> int:
    if sign in (+1, "+", "plus"):
        return 1
    if sign in (-1, "-", "minus"):
        return -1
    raise ValueError(f"sign must be + or −, got {sign!r}")


def _wrap(field: Field, spec: HarmonicSpectrum) -> Field:
    return spec if isinstance(field, HarmonicSpectrum) else synthesize(spec)


def apply_Lambda(field: Field) -> Field:
    spec = as_spectrum(field)
    return _wrap(field, spec.with_coeffs(spec.coeffs * lambda_eigenvalue(spec.degrees, spec.n)[None, :]))


def apply_laplace_beltrami(field: Field) -> Field:
    """Δ_ω applied spectrally (eigenvalue −k(k+n−2))."""
    spec = as_spectrum(field)
    lam = laplace_beltrami_eigenvalue(spec.degrees, spec.n)
    return _wrap(field, spec.with_coeffs(-spec.coeffs * lam[None, :]))


def apply_L(field: Field, sign) -> Field:
    s = _sign(sign)
    spec = as_spectrum(field)
    c = d_dt(spec.coeffs, spec.tgrid.dt) + spec.coeffs * _l_multiplier(spec, s)[None, :]
    return _wrap(field, spec.with_coeffs(c))


@dataclass(frozen=True)
class ConjugationSpec:
    sign: int
    tau: float

    def __post_init__(self):
        object.__setattr__(self, "sign", _sign(self.sign))
        if not (math.isfinite(self.tau) and self.tau >= 0):
            raise ValueError("tau must be finite and ≥ 0")


def apply_L_tau(field: Field, spec: ConjugationSpec) -> Field:
    """e^{−τφ} L± e^{τφ} u = ∂_t u + (mult_k) u + τ(1 + 2/t) u."""
    sp = as_spectrum(field)
    dv = dvarphi(sp.tgrid.t)
    c = (
        d_dt(sp.coeffs, sp.tgrid.dt)
        + sp.coeffs * _l_multiplier(sp, spec.sign)[None, :]
        + spec.tau * dv[:, None] * sp.coeffs
    )
    return _wrap(field, sp.with_coeffs(c))


def apply_L_tau_explicit(field: Field, spec: ConjugationSpec) -> Field:
    """Two-path oracle: conjugate by explicit exponentials then apply L±."""
    sp = as_spectrum(field)
    w = np.exp(spec.tau * varphi(sp.tgrid.t))[:, None]
    inner = sp.with_coeffs(sp.coeffs * w)
    out = as_spectrum(apply_L(inner, spec.sign))
    return _wrap(field, out.with_coeffs(out.coeffs / w))


def polar_laplacian(field: Field, order: str = "+-") -> Field:
    """e^{2t}Δu as L⁺∘L⁻ (``order='+-'``) or L⁻∘L⁺ (``'-+'``)."""
    first, second = (-1, +1) if order == "+-" else (+1, -1)
    spec = as_spectrum(field)
    return _wrap(field, apply_L(apply_L(spec, first), second))


def polar_laplacian_direct(field: Field) -> Field:
    """∂²_t u + (n−2)∂_t u + Δ_ω u with a direct second-difference stencil."""
    sp = as_spectrum(field)
    h = sp.tgrid.dt
    lam = laplace_beltrami_eigenvalue(sp.degrees, sp.n)
    c = d2_dt2(sp.coeffs, h) + (sp.n - 2) * d_dt(sp.coeffs, h) - sp.coeffs * lam[None, :]
    return _wrap(field, sp.with_coeffs(c))


# --------------------------------------------------------------------------
# kernel solver for L⁻_τ


@dataclass(frozen=True)
class KernelBranch:
    tau: float
    N: np.ndarray  # per t-node, ceil(τ φ'(t))
    cutoff_M: int

    def label(self, k: int) -> np.ndarray:
        """'low' (k ≤ N−1), 'middle' (N ≤ k ≤ M) or 'high' (k > M) per t-node."""
        out = np.where(k <= self.N - 1, "low", "middle").astype(object)
        if k > self.cutoff_M:
            out[:] = "high"
        return out

    def forward(self, k: int) -> np.ndarray:
        return k >= self.N


def kernel_branch(tgrid: TGrid, tau: float) -> KernelBranch:
    N = np.ceil(tau * dvarphi(tgrid.t) - 1e-12).astype(int)
    return KernelBranch(float(tau), N, int(math.ceil(2.0 * tau - 1e-12)))


_GL_X, _GL_W = np.polynomial.legendre.leggauss(4)
_GL_X = 0.5 * (_GL_X + 1.0)  # on (0, 1)
_GL_W = 0.5 * _GL_W


def _lagrange_weights(xi: np.ndarray) -> np.ndarray:
    """Cubic Lagrange weights on nodes 0..3 evaluated at ``xi``; shape (len(xi), 4)."""
    nodes = np.arange(4.0)
    w = np.ones((xi.shape[0], 4))
    for j in range(4):
        for m in range(4):
            if m != j:
                w[:, j] *= (xi - nodes[m]) / (nodes[j] - nodes[m])
    return w


def _rhs_at_gauss(coeffs: np.ndarray) -> np.ndarray:
    """Cubic interpolation of node values onto the 4 Gauss points of each cell."""
    nt = coeffs.shape[0]
    cells = np.arange(nt - 1)
    start = np.clip(cells - 1, 0, nt - 4)
    offset = cells - start
    out = np.empty((nt - 1, _GL_X.shape[0], coeffs.shape[1]), dtype=np.complex128)
    for o in (0, 1, 2):
        sel = offset == o
        if not np.any(sel):
            continue
        lw = _lagrange_weights(o + _GL_X)  # (G, 4)
        idx = start[sel][:, None] + np.arange(4)[None, :]  # (ns, 4)
        out[sel] = np.einsum("gm,smc->sgc", lw, coeffs[idx])
    return out


def solve_Lminus_tau(rhs: Field, tau: float) -> Field:
    """Per-degree Heaviside-kernel solution of L⁻_τ u = rhs.

    Each cell integral uses 4-point Gauss-Legendre with the kernel exponent
    evaluated exactly and the right-hand side interpolated by local cubics.
    """
    if not (math.isfinite(tau) and tau >= 0):
        raise ValueError("tau must be finite and ≥ 0")
    spec = as_spectrum(rhs)
    tg = spec.tgrid
    t, h = tg.t, tg.dt
    branch = kernel_branch(tg, tau)
    s_gauss = t[:-1, None] + h * _GL_X[None, :]
    vphi_nodes = varphi(t)
    vphi_gauss = varphi(s_gauss)
    f_all = _rhs_at_gauss(spec.coeffs)
    out = np.zeros_like(spec.coeffs)
    gw = h * _GL_W
    for k in np.unique(spec.degrees):
        cols = np.nonzero(spec.degrees == k)[0]
        if not np.any(spec.coeffs[:, cols]):
            continue
        a_nodes = tau * vphi_nodes - k * t
        a_gauss = tau * vphi_gauss - k * s_gauss
        u, worst, wi, wj = kernel_solve(a_nodes, a_gauss, f_all[:, :, cols], gw, branch.forward(int(k)))
        if worst > 600.0:
            raise KernelOverflow(
                f"kernel exponent {worst:.1f} > 600 at k={k}, s≈{t[wj]:.4f}, t={t[wi]:.4f}",
                int(k),
                float(t[wj]),
                float(t[wi]),
            )
        out[:, cols] = u
    return _wrap(rhs, spec.with_coeffs(out))


def kernel_decay_check(tgrid: TGrid, k: int, tau: float) -> float:
    """max over grid pairs s ≥ t of log(H(s−t)S_k(s,t)) + k|t−s|/2; ≤ 0 means the bound holds."""
    return kernel_decay_excess(tgrid.t, varphi(tgrid.t), k, tau)


# --------------------------------------------------------------------------
# Taylor remainder of varphi


@dataclass(frozen=True)
class TaylorGap:
    remainder: float
    lower: float
    upper: float

    @property
    def certified(self) -> bool:
        slack = 1e-13 * max(1.0, abs(self.lower))
        return self.lower - slack <= self.remainder <= self.upper + slack


def taylor_gap(s: float, t: float, tau: float = 1.0) -> TaylorGap:
    """varphi(s) − varphi(t) − varphi′(t)(s−t), bracketed by −(s−t)²/min(s²,t²) and −(s−t)²/max(s²,t²).

    ``tau`` scales nothing here; it is accepted so callers can pass the
    Carleman parameter through uniformly.
    """
    if not (s < -3 and t < -3):
        raise DomainError("taylor_gap needs s, t < −3")
    d = s - t
    rem = varphi(s) - varphi(t) - dvarphi(t) * d
    return TaylorGap(float(rem), -d * d / min(s * s, t * t), -d * d / max(s * s, t * t))
