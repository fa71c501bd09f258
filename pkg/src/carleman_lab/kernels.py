"""Hot loops: normalized associated Legendre recurrence, the Heaviside-kernel
convolution quadrature behind the L⁻_τ solver, and the kernel decay scan.

Each kernel exists as a pure-numpy implementation and as a loop
implementation compiled by numba.  The public names dispatch on
``_backend.BACKEND``; the ``*_numpy`` and ``*_loops`` variants stay
importable for benchmarking and cross-checking.
"""

from __future__ import annotations

import math

import numpy as np

from ._backend import BACKEND, HAVE_NUMBA, njit

# --------------------------------------------------------------------------
# associated Legendre functions, orthonormal on the sphere, no Condon-Shortley
# phase.  Output layout: P[i, l, m] for 0 <= m <= l <= lmax.


def legendre_table_numpy(lmax: int, x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    nx = x.shape[0]
    out = np.zeros((nx, lmax + 1, lmax + 1))
    sin_t = np.sqrt(np.clip(1.0 - x * x, 0.0, None))
    pmm = np.full(nx, math.sqrt(1.0 / (4.0 * math.pi)))
    for m in range(lmax + 1):
        if m > 0:
            pmm = pmm * math.sqrt((2.0 * m + 1.0) / (2.0 * m)) * sin_t
        out[:, m, m] = pmm
        if m + 1 <= lmax:
            out[:, m + 1, m] = math.sqrt(2.0 * m + 3.0) * x * pmm
        for l in range(m + 2, lmax + 1):
            a = math.sqrt((4.0 * l * l - 1.0) / (l * l - m * m))
            b = math.sqrt(((l - 1.0) ** 2 - m * m) / (4.0 * (l - 1.0) ** 2 - 1.0))
            out[:, l, m] = a * (x * out[:, l - 1, m] - b * out[:, l - 2, m])
    return out


def _legendre_table_loops(lmax, x):
    nx = x.shape[0]
    out = np.zeros((nx, lmax + 1, lmax + 1))
    for i in range(nx):
        xi = x[i]
        st = math.sqrt(max(1.0 - xi * xi, 0.0))
        pmm = math.sqrt(1.0 / (4.0 * math.pi))
        for m in range(lmax + 1):
            if m > 0:
                pmm = pmm * math.sqrt((2.0 * m + 1.0) / (2.0 * m)) * st
            out[i, m, m] = pmm
            if m + 1 <= lmax:
                out[i, m + 1, m] = math.sqrt(2.0 * m + 3.0) * xi * pmm
            for l in range(m + 2, lmax + 1):
                a = math.sqrt((4.0 * l * l - 1.0) / (l * l - m * m))
                b = math.sqrt(((l - 1.0) ** 2 - m * m) / (4.0 * (l - 1.0) ** 2 - 1.0))
                out[i, l, m] = a * (xi * out[i, l - 1, m] - b * out[i, l - 2, m])
    return out


# --------------------------------------------------------------------------
# Convolution quadrature for  u(t_i) = ∓∫ H(±(s - t_i)) exp(A(s) - A(t_i)) f(s) ds.
#
# ``a_nodes``   A at grid nodes, shape (Nt,)
# ``a_gauss``   A at Gauss points of each cell, shape (Nt-1, G)
# ``f_gauss``   rhs at the same Gauss points, shape (Nt-1, G, ncol), complex
# ``gw``        Gauss weights already scaled to the cell width, shape (G,)
# ``forward``   bool per node; True selects the H(s - t) branch.
# Returns (u, worst_exponent, worst_i, worst_j).


def kernel_solve_numpy(a_nodes, a_gauss, f_gauss, gw, forward):
    nt = a_nodes.shape[0]
    ncol = f_gauss.shape[2]
    u = np.zeros((nt, ncol), dtype=np.complex128)
    wf = f_gauss * gw[None, :, None]
    worst, wi, wj = -np.inf, -1, -1
    for i in range(nt):
        if forward[i]:
            if i >= nt - 1:
                continue
            ex = a_gauss[i:] - a_nodes[i]
            sign, j0 = -1.0, i
        else:
            if i == 0:
                continue
            ex = a_gauss[:i] - a_nodes[i]
            sign, j0 = 1.0, 0
        emax = ex.max()
        if emax > worst:
            worst = emax
            wi, wj = i, j0 + int(np.unravel_index(np.argmax(ex), ex.shape)[0])
        if emax > 600.0:
            return u, worst, wi, wj
        blk = wf[i:] if forward[i] else wf[:i]
        u[i] = sign * np.einsum("jg,jgc->c", np.exp(ex), blk)
    return u, worst, wi, wj


def _kernel_solve_loops(a_nodes, a_gauss, f_gauss, gw, forward):
    nt = a_nodes.shape[0]
    ng = a_gauss.shape[1]
    ncol = f_gauss.shape[2]
    u = np.zeros((nt, ncol), dtype=np.complex128)
    worst = -np.inf
    wi = -1
    wj = -1
    for i in range(nt):
        ai = a_nodes[i]
        if forward[i]:
            jlo, jhi, sign = i, nt - 1, -1.0
        else:
            jlo, jhi, sign = 0, i, 1.0
        for j in range(jlo, jhi):
            for g in range(ng):
                e = a_gauss[j, g] - ai
                if e > worst:
                    worst = e
                    wi = i
                    wj = j
                if e > 600.0:
                    return u, worst, wi, wj
                w = sign * gw[g] * math.exp(e)
                for c in range(ncol):
                    u[i, c] += w * f_gauss[j, g, c]
    return u, worst, wi, wj


# --------------------------------------------------------------------------
# Decay scan: max over grid pairs s >= t of  k(t-s) + τ(φ(s)-φ(t)) + k(s-t)/2.
# Non-positive means H(s-t) S_k(s,t) <= exp(-k|t-s|/2) on every pair.


def kernel_decay_excess_numpy(t, vphi, k, tau):
    d = t[None, :] - t[:, None]  # s - t, rows index t, columns index s
    ex = -k * d + tau * (vphi[None, :] - vphi[:, None]) + 0.5 * k * d
    ex = np.where(d >= 0.0, ex, -np.inf)
    return float(ex.max())


def _kernel_decay_excess_loops(t, vphi, k, tau):
    nt = t.shape[0]
    worst = -np.inf
    for i in range(nt):
        for j in range(i, nt):
            d = t[j] - t[i]
            e = -0.5 * k * d + tau * (vphi[j] - vphi[i])
            if e > worst:
                worst = e
    return worst


if HAVE_NUMBA:
    legendre_table_loops = njit(_legendre_table_loops)
    kernel_solve_loops = njit(_kernel_solve_loops)
    kernel_decay_excess_loops = njit(_kernel_decay_excess_loops)
else:  # pragma: no cover
    legendre_table_loops = _legendre_table_loops
    kernel_solve_loops = _kernel_solve_loops
    kernel_decay_excess_loops = _kernel_decay_excess_loops


def legendre_table(lmax: int, x: np.ndarray) -> np.ndarray:
    x = np.ascontiguousarray(x, dtype=np.float64)
    if BACKEND == "numba":
        return legendre_table_loops(int(lmax), x)
    return legendre_table_numpy(int(lmax), x)


def kernel_solve(a_nodes, a_gauss, f_gauss, gw, forward):
    args = (
        np.ascontiguousarray(a_nodes, dtype=np.float64),
        np.ascontiguousarray(a_gauss, dtype=np.float64),
        np.ascontiguousarray(f_gauss, dtype=np.complex128),
        np.ascontiguousarray(gw, dtype=np.float64),
        np.ascontiguousarray(forward, dtype=np.bool_),
    )
    if BACKEND == "numba":
        return kernel_solve_loops(*args)
    return kernel_solve_numpy(*args)


def kernel_decay_excess(t, vphi, k, tau) -> float:
    t = np.ascontiguousarray(t, dtype=np.float64)
    vphi = np.ascontiguousarray(vphi, dtype=np.float64)
    if BACKEND == "numba":
        return float(kernel_decay_excess_loops(t, vphi, float(k), float(tau)))
    return kernel_decay_excess_numpy(t, vphi, float(k), float(tau))
