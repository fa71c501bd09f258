"""Unique continuation at infinity by rescaling.

A solution seen from a far point x₀ (|x₀| = R) is pulled back to the unit
scale, u_R(x) = u(x₀ + Rx), which multiplies the potentials by R and R²
and their Lebesgue norms by R^{1−n/s} and R^{2−n/t}.  Feeding those norms
into the vanishing-order bound gives M(R) ≥ exp(−C R^Π log R).
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, replace
from typing import Callable, Sequence

import numpy as np

from .corpus import ManufacturedSolution, SingularPotential
from .errors import DomainCoverage, RTooSmall, RangeViolation
from .exponents import Regime, check_admissible, kappa, mu, pi_exponent
from .spectral import SphereGrid
from .uniqueness import NormSampler, ball_sup

# --------------------------------------------------------------------------
# scale map and pullbacks


@dataclass(frozen=True)
class ScaleMap:
    x0: tuple
    R: float

    def __post_init__(self):
        object.__setattr__(self, "x0", tuple(float(v) for v in self.x0))
        if len(self.x0) != 3:
            raise ValueError("x0 must be a point in R³")
        if not (math.isfinite(self.R) and self.R > 0):
            raise RangeViolation("R must be finite and > 0")

    @classmethod
    def at(cls, R: float, direction=(1.0, 0.0, 0.0)) -> "ScaleMap":
        d = np.asarray(direction, dtype=float)
        return cls(tuple(R * d / np.linalg.norm(d)), R)

    def __call__(self, x: np.ndarray) -> np.ndarray:
        return np.asarray(self.x0) + self.R * np.asarray(x, dtype=float)


def _power(obj) -> int:
    """Scaling weight: 1 for drifts, 2 for potentials."""
    return 1 if getattr(obj, "vector", False) else 2


@dataclass(frozen=True)
class RescaledPotential:
    """x ↦ R^w·P(x₀ + Rx) together with its certified L^p(B_r(0)) norm."""

    source: object
    map: ScaleMap
    weight: int  # 1 for W, 2 for V
    p: float
    r: float
    analytic_norm: float
    predicted_norm: float  # R^{w − n/p}·‖P‖_{L^p(B_{rR}(x₀))}
    quadrature_norm: float

    def __call__(self, x: np.ndarray) -> np.ndarray:
        return self.map.R**self.weight * self.source(self.map(x))

    @property
    def analytic_error(self) -> float:
        return abs(self.analytic_norm - self.predicted_norm) / self.predicted_norm

    @property
    def quadrature_error(self) -> float:
        return abs(self.quadrature_norm - self.predicted_norm) / self.predicted_norm

    @property
    def factor(self) -> float:
        return self.map.R ** (self.weight - 3 / self.p) if math.isfinite(self.p) else self.map.R**self.weight


def scaling_factor(R: float, p: float, weight: int, n: int = 3) -> float:
    """R^{1−n/s} for drifts (weight 1), R^{2−n/t} for potentials (weight 2)."""
    return R ** (weight - (0.0 if math.isinf(p) else n / p))


def pullback_norm_quadrature(fn: Callable, p: float, r: float, breaks: Sequence[float] = (),
                             nodes: int = 64, sphere_kmax: int = 8, floor: float = 1e-14) -> float:
    """‖fn‖_{L^p(B_r(0))} by Gauss-Legendre in log ρ on each piece between ``breaks`` × a sphere grid.

    The log substitution resolves integrable point singularities at the origin;
    the mass below ``floor``·r is dropped.
    """
    sg = SphereGrid(sphere_kmax)
    cuts = sorted({math.log(floor * r), math.log(r), *(math.log(b) for b in breaks if floor * r < b < r)})
    x, w = np.polynomial.legendre.leggauss(nodes)
    if math.isinf(p):
        rr = np.geomspace(floor * r, r, 400)
        pts = rr[:, None, None] * sg.points[None]
        return float(np.abs(fn(pts)).max())
    total = 0.0
    for a, b in zip(cuts, cuts[1:]):
        s = 0.5 * (b - a) * x + 0.5 * (b + a)
        rho = np.exp(s)
        pts = rho[:, None, None] * sg.points[None]
        vals = np.abs(fn(pts))
        if vals.ndim == 3:  # vector field: Euclidean magnitude
            vals = np.linalg.norm(fn(pts), axis=-1)
        ang = (vals**p) @ sg.weights
        total += 0.5 * (b - a) * float(np.sum(w * ang * rho**3))
    return total ** (1.0 / p)


def rescale_potential(P: SingularPotential, smap: ScaleMap, r: float = 1.0, p: float | None = None) -> RescaledPotential:
    """Pull back a potential singular at x₀ and certify the norm-scaling law two ways.

    Analytic path: the pullback is again c′·min(|x|^{−α}, cap′) with
    c′ = R^{w−α}c and cap′ = R^α·cap, whose norm has a closed form.
    Quadrature path: the pullback is integrated numerically as a black box.
    """
    if np.linalg.norm(np.asarray(P.center) - np.asarray(smap.x0)) > 1e-12 * max(1.0, smap.R):
        raise DomainCoverage("the potential must be centered at x₀ for the closed-form path")
    p = P.exponent if p is None else p
    w = _power(P)
    R = smap.R
    pulled = replace(P, c=P.c * R ** (w - P.alpha), cap=P.cap * R**P.alpha, center=(0.0, 0.0, 0.0))
    predicted = scaling_factor(R, p, w) * P.norm(r * R, p)
    analytic = pulled.norm(r, p)

    def fn(x):
        return R**w * P(smap(x))

    quad = pullback_norm_quadrature(fn, p, r, breaks=(pulled.r_cap,))
    return RescaledPotential(P, smap, w, p, r, analytic, predicted, quad)


def rescale_constant(c: float, smap: ScaleMap, p: float, r: float = 1.0, weight: int = 2) -> RescaledPotential:
    """Constant potential V ≡ c: ‖V_R‖_{L^p(B_r)} = R²·c·|B_r|^{1/p}."""
    ball = 4.0 * math.pi * r**3 / 3.0
    vol = 1.0 if math.isinf(p) else ball ** (1.0 / p)
    predicted = scaling_factor(smap.R, p, weight) * abs(c) * (1.0 if math.isinf(p) else (ball * smap.R**3) ** (1.0 / p))
    analytic = smap.R**weight * abs(c) * vol
    src = SingularPotential(0.0, p, abs(c), vector=weight == 1)

    def fn(x):
        return smap.R**weight * np.full(np.asarray(x).shape[:-1], abs(c))

    quad = pullback_norm_quadrature(fn, p, r)
    return RescaledPotential(src, smap, weight, p, r, analytic, predicted, quad)


def rescale_solution(sol: ManufacturedSolution, smap: ScaleMap, radius: float = 10.0) -> ManufacturedSolution:
    """u_R(x) = u(x₀ + Rx) with W_R = R·W(x₀+R·), V_R = R²·V(x₀+R·); residual_R = R²·residual(x₀+R·)."""
    lo, hi = sol.support
    reach = np.linalg.norm(smap.x0) + radius * smap.R
    if reach > hi or lo > 0:
        raise DomainCoverage(
            f"B_{radius}(0) maps onto a ball reaching |x| = {reach:.4g}, outside the certified support {sol.support}"
        )
    R = smap.R

    def u(x):
        return sol.u(smap(x))

    def grad(x):
        return R * sol.grad(smap(x))

    def lap(x):
        return R * R * sol.lap(smap(x))

    def W(x):
        return R * sol.W(smap(x))

    def V(x):
        return R * R * sol.V(smap(x))

    out = ManufacturedSolution(
        f"{sol.kind}@R={R:g}", {**sol.params, "R": R, "x0": smap.x0}, u, grad, lap, W, V,
        order=sol.order, K=sol.K, M=sol.M, support=(0.0, radius),
    )
    out.residual_certificate = sol.residual_certificate
    return out


def rescale(obj, smap: ScaleMap, **kw):
    """Dispatch on the source: singular potential, constant, or manufactured solution."""
    if isinstance(obj, SingularPotential):
        return rescale_potential(obj, smap, **kw)
    if isinstance(obj, ManufacturedSolution):
        return rescale_solution(obj, smap, **kw)
    if isinstance(obj, (int, float)):
        return rescale_constant(float(obj), smap, **kw)
    raise TypeError(f"cannot rescale {type(obj).__name__}")


def random_scaling_pairs(count: int = 20, seed: int = 0) -> list[tuple[SingularPotential, ScaleMap]]:
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        vector = bool(rng.integers(2))
        p = float(rng.choice([4.0, 6.0, 7.0, 9.0, 12.0]))
        alpha = float(rng.uniform(0.0, 0.9 * 3.0 / p))
        R = float(np.exp(rng.uniform(0.0, np.log(50.0))))
        direction = rng.normal(size=3)
        smap = ScaleMap.at(R, direction)
        P = SingularPotential(alpha, p, float(rng.uniform(0.5, 2.0)), cap=1e4, center=smap.x0, vector=vector)
        out.append((P, smap))
    return out


# --------------------------------------------------------------------------
# Π consistency


def pi_sides(regime: Regime) -> tuple[float, float]:
    """(max{κ(1−n/s), μ(2−n/t)} over active terms, Π)."""
    n = regime.n
    sides = []
    if regime.mode != "V-only":
        sides.append(kappa(regime) * (1.0 - n * regime.sigma))
    if regime.mode != "W-only":
        sides.append(mu(regime) * (2.0 - n * regime.theta))
    return max(sides), pi_exponent(regime)


@dataclass
class PiReport:
    rows: list

    @property
    def max_error(self) -> float:
        return max((abs(a - b) for _, a, b in self.rows), default=0.0)

    @property
    def passed(self) -> bool:
        return self.max_error <= 1e-12


def admissible_grid(ns: Sequence[int] = (3, 4, 5), size: int = 12) -> list[Regime]:
    """Regimes covering both VW branches, both V-only branches and W-only, including s, t = ∞."""
    out = []
    for n in ns:
        s_lo = (3 * n - 2) / 2
        t_lo_vw = n * (3 * n - 2) / (5 * n - 2)
        t_lo_v = 4 * n * n / (7 * n + 2)
        s_vals = list(s_lo * (1 + np.geomspace(1e-3, 20, size))) + [math.inf]
        t_vals_vw = list(t_lo_vw * (1 + np.geomspace(1e-3, 30, size))) + [math.inf]
        t_vals_v = list(t_lo_v * (1 + np.geomspace(1e-3, 30, size))) + [math.inf]
        cands = [Regime(n, s=s, t=t, mode="VW") for s in s_vals for t in t_vals_vw]
        cands += [Regime(n, s=s, mode="W-only") for s in s_vals]
        cands += [Regime(n, t=t, mode="V-only") for t in t_vals_v]
        for reg in cands:
            try:
                check_admissible(reg)
            except ValueError:
                continue
            out.append(reg)
    return out


def pi_consistency(regime: Regime | Sequence[Regime] | None = None) -> PiReport:
    regimes = admissible_grid() if regime is None else ([regime] if isinstance(regime, Regime) else list(regime))
    rows = []
    for reg in regimes:
        check_admissible(reg)
        a, b = pi_sides(reg)
        rows.append((reg, a, b))
    return PiReport(rows)


# --------------------------------------------------------------------------
# M(R)


@dataclass(frozen=True)
class MRQuery:
    R: float
    regime: Regime
    A0: float = 1.0
    A1: float = 1.0
    C0: float = 1.0
    C1: float = 1.0
    C2: float = 1.0
    c: float = 1.0  # small constant of the vanishing-order bound, 0 < c ≤ 1

    def __post_init__(self):
        for name in ("A0", "A1", "C0"):
            if not getattr(self, name) >= 1:
                raise RangeViolation(f"{name} ≥ 1 required")
        if not 0 < self.c <= 1:
            raise RangeViolation("0 < c ≤ 1 required")
        check_admissible(self.regime)


@dataclass
class MRReport:
    R: float
    Pi: float
    C: float
    log_bound: float
    log_bound_unmaximized: float  # before bounding each power of R by R^Π
    empirical: float = float("nan")
    in_regime: bool = True

    @property
    def bound(self) -> float:
        return math.exp(self.log_bound) if self.log_bound > -745 else 0.0

    @property
    def sound(self) -> bool:
        """Bound never exceeds the empirical M(R) (vacuous when none was sampled)."""
        if math.isnan(self.empirical):
            return True
        return self.empirical > 0 and self.log_bound <= math.log(self.empirical)

    def row(self) -> dict:
        return {"R": self.R, "Pi": self.Pi, "C": self.C, "bound": self.bound, "log_bound": self.log_bound,
                "empirical": self.empirical, "in_regime": self.in_regime, "sound": self.sound}


def mr_constant(q: MRQuery) -> float:
    """C = C₁A₁^κ + C₂A₀^μ + log(1/c) over the regime's active potentials."""
    total = math.log(1.0 / q.c)
    if q.regime.mode != "V-only":
        total += q.C1 * q.A1 ** kappa(q.regime)
    if q.regime.mode != "W-only":
        total += q.C2 * q.A0 ** mu(q.regime)
    return total


def m_of_R_report(query: MRQuery, solution: ManufacturedSolution | None = None, directions: int = 64,
                  sampler: NormSampler = NormSampler(8, 6, 2)) -> MRReport:
    R = query.R
    if not R > math.e:
        raise RTooSmall(f"R = {R} ≤ e")
    reg = query.regime
    n = reg.n
    Pi = pi_exponent(reg)
    C = mr_constant(query)
    logR = math.log(R)
    exact = math.log(1.0 / query.c)
    if reg.mode != "V-only":
        exact += query.C1 * (query.A1 * R ** (1 - n * reg.sigma)) ** kappa(reg)
    if reg.mode != "W-only":
        exact += query.C2 * (query.A0 * R ** (2 - n * reg.theta)) ** mu(reg)
    rep = MRReport(R, Pi, C, -C * R**Pi * logR, -exact * logR, in_regime=R >= math.e**3)
    if solution is not None:
        rep.empirical = empirical_M(solution, R, directions, sampler)
    return rep


def fibonacci_sphere(count: int) -> np.ndarray:
    i = np.arange(count) + 0.5
    z = 1 - 2 * i / count
    az = math.pi * (1 + 5**0.5) * i
    s = np.sqrt(1 - z * z)
    return np.stack([s * np.cos(az), s * np.sin(az), z], axis=1)


def empirical_M(solution: ManufacturedSolution, R: float, directions: int = 64,
                sampler: NormSampler = NormSampler(8, 6, 2)) -> float:
    """inf over sampled centers |x₀| = R of the sampled sup of |u| on B₁(x₀).

    Both samplings are approximations in opposite directions (fewer centers raise
    the inf, fewer points lower each sup); closed-form solutions should be
    preferred when the exact value is known.
    """
    centers = R * fibonacci_sphere(directions)
    return float(min(ball_sup(solution.u, 1.0, c, sampler) for c in centers))


def cosine_solution(a: float = 4.0) -> ManufacturedSolution:
    """u = cos(a·x₁): a bounded global solution of Δu + a²u = 0 with |u(0)| = 1."""

    def u(p):
        return np.cos(a * np.asarray(p, dtype=float)[..., 0])

    def grad(p):
        g = np.zeros(np.asarray(p).shape)
        g[..., 0] = -a * np.sin(a * np.asarray(p, dtype=float)[..., 0])
        return g

    def lap(p):
        return -a * a * u(p)

    def V(p):
        return np.full(np.asarray(p).shape[:-1], a * a)

    sol = ManufacturedSolution("cosine", {"a": a}, u, grad, lap, V=V, M=max(1.0, a * a),
                               support=(0.0, math.inf))
    sol.certify()
    return sol


def mr_reports_csv(reports: Sequence[MRReport]) -> str:
    buf = io.StringIO()
    cols = ["R", "Pi", "C", "bound", "log_bound", "empirical", "in_regime", "sound"]
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(cols)
    for rep in reports:
        row = rep.row()
        w.writerow([_fmt(row[c]) for c in cols])
    return buf.getvalue()


def _fmt(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return f"{v:.12g}"
    return str(v)

