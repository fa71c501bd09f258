"""Three-ball inequalities, the Caccioppoli estimate, vanishing-order fits and
propagation of smallness, evaluated on manufactured solutions.

Ball norms are computed directly from the solution's closed form: L^∞ norms
as grid suprema over polar samples (radially refined toward the ball's
edge), L² norms by Gauss product quadrature.  The constants that the
estimates only assert to exist are calibrated on one half of a corpus and
checked on the other.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Iterator, Sequence

import numpy as np

from .corpus import ManufacturedSolution
from .errors import (
    CertificateMissing,
    ChainGeometryError,
    DegenerateData,
    EmptyCorpus,
    OrderingViolation,
)
from .exponents import BoundInputs, Regime, exponent_set, kappa, mu
from .spectral import SphereGrid, phi

DEFAULT_R0 = 0.05
SAFETY = 1.5

# --------------------------------------------------------------------------
# radii and k0


@dataclass(frozen=True)
class RadiiTriple:
    r0: float
    r1: float
    R1: float
    R0: float = DEFAULT_R0

    def __post_init__(self):
        if not (0 < self.r0 < self.r1 < self.R1 < self.R0 <= 1):
            raise OrderingViolation(
                f"need 0 < r0 < r1 < R1 < R0 ≤ 1, got {self.r0}, {self.r1}, {self.R1}, {self.R0}"
            )
        if self.R0 >= 1:
            raise OrderingViolation("R0 < 1 required")


@dataclass(frozen=True)
class K0:
    value: float
    asymptotic: float  # k0·log(1/r0), ≃ constant as r0 → 0

    def __float__(self) -> float:
        return self.value


def k0(radii: RadiiTriple) -> K0:
    if not radii.r1 < radii.R1 / 2:
        raise OrderingViolation(f"k0 needs r1 < R1/2, got r1={radii.r1}, R1/2={radii.R1 / 2}")
    top = phi(radii.R1 / 2)
    val = (top - phi(radii.r1)) / (top - phi(radii.r0))
    return K0(float(val), float(val * math.log(1.0 / radii.r0)))


def k0_asymptotics(r1: float, R1: float, r0s: Sequence[float] = (1e-3, 1e-4, 1e-5, 1e-6)) -> dict:
    """k0·log(1/r0) along a shrinking r0 sequence, with the spread and step-to-step changes."""
    vals = [k0(RadiiTriple(r0, r1, R1, max(DEFAULT_R0, R1 * 1.01))).asymptotic for r0 in r0s]
    steps = [abs(b / a - 1.0) for a, b in zip(vals, vals[1:])]
    return {
        "r0": list(r0s),
        "k0_log": vals,
        "spread": max(vals) / min(vals),
        "steps": steps,
        "stable_10pct": max(vals) / min(vals) <= 1.10,
    }


# --------------------------------------------------------------------------
# exponent bookkeeping shared by the inequalities


def _w_power(s: float, n: int) -> float:
    return 1.0 if math.isinf(s) else s / (s - n)  # s/(s−n)


def _v_power(t: float, n: int) -> float:
    return 0.5 if math.isinf(t) else t / (2 * t - n)  # t/(2t−n)


def F_factor(r: float, K: float, M: float, regime: Regime) -> float:
    """F(r) = 1 + r K^{s/(s−n)} + r M^{t/(2t−n)}; V-only drops the K term."""
    n = regime.n
    out = 1.0 + r * M ** _v_power(regime.t, n)
    if regime.mode != "V-only":
        out += r * K ** _w_power(regime.s, n)
    return out


def _growth(bounds: BoundInputs, regime: Regime) -> float:
    """C₁K^κ + C₂M^μ for the regime's active potentials."""
    total = 0.0
    if regime.mode != "V-only":
        total += bounds.C1 * bounds.K ** kappa(regime)
    if regime.mode != "W-only":
        total += bounds.C2 * bounds.M ** mu(regime)
    return total


def order_bound(K: float, M: float, regime: Regime, C1: float = 1.0, C2: float = 1.0) -> float:
    return _growth(BoundInputs(K=max(K, 1.0), M=max(M, 1.0), C1=C1, C2=C2), regime)


# --------------------------------------------------------------------------
# ball norms of closed-form solutions


@dataclass(frozen=True)
class NormSampler:
    """Sampling recipe for ball norms; the defaults resolve degrees up to ~16."""

    sphere_kmax: int = 16
    radial: int = 16
    refine: int = 6

    def sphere(self) -> SphereGrid:
        return SphereGrid(self.sphere_kmax, 2)

    def radii(self, radius: float) -> np.ndarray:
        # geometric interior samples plus a cluster at the edge
        inner = radius * np.geomspace(1e-3, 1.0, self.radial)
        edge = radius * (1.0 - np.geomspace(1e-6, 0.05, self.refine))
        return np.unique(np.concatenate(([0.0], inner, edge)))


DEFAULT_SAMPLER = NormSampler()


def ball_sup(u: Callable, radius: float, center=(0.0, 0.0, 0.0), sampler: NormSampler = DEFAULT_SAMPLER) -> float:
    sg = sampler.sphere()
    r = sampler.radii(radius)
    pts = np.asarray(center, float) + r[:, None, None] * sg.points[None, :, :]
    return float(np.abs(u(pts)).max())


def ball_l2(u: Callable, radius: float, center=(0.0, 0.0, 0.0), nodes: int = 28) -> float:
    x, w = np.polynomial.legendre.leggauss(nodes)
    r = 0.5 * radius * (x + 1.0)
    wr = 0.5 * radius * w * r * r
    sg = SphereGrid(nodes // 2)
    pts = np.asarray(center, float) + r[:, None, None] * sg.points[None, :, :]
    vals = np.abs(u(pts)) ** 2
    return float(math.sqrt(np.sum(wr[:, None] * sg.weights[None, :] * vals)))


def gradient_l2_polar(sol: ManufacturedSolution, radius: float, nodes: int = 24, k_max: int = 14) -> float:
    """‖∇u‖_{L²(B_radius)} from |∇u|² = |∂_r u|² + r⁻²|∇_ω u|², the angular part spectrally."""
    x, w = np.polynomial.legendre.leggauss(nodes)
    r = 0.5 * radius * (x + 1.0)
    wr = 0.5 * radius * w
    sg = SphereGrid(k_max, 1)
    pts = r[:, None, None] * sg.points[None, :, :]
    rows = sol.u(pts) @ sg._analysis  # (radius, mode) coefficients
    lam = sg.degrees * (sg.degrees + 1.0)
    angular = (rows**2) @ lam  # ∫|∇_ω u|² dω at each radius
    dr = np.sum(sol.grad(pts) * sg.points[None, :, :], axis=-1)  # x̂·∇u
    radial = (dr**2) @ sg.weights * r**2
    return float(math.sqrt(np.sum(wr * (radial + angular))))


def _need_certificate(sol: ManufacturedSolution, tol: float = 1e-6) -> None:
    c = sol.residual_certificate
    if not (isinstance(c, float) and math.isfinite(c)):
        raise CertificateMissing(f"{sol.kind}: residual certificate missing")
    if c > tol:
        raise CertificateMissing(f"{sol.kind}: residual certificate {c:.3g} > {tol:g}")


# --------------------------------------------------------------------------
# three-ball inequality


@dataclass
class ThreeBallReport:
    kind: str
    radii: RadiiTriple
    k0: float
    F: dict
    lhs: float
    term1: float
    term2: float
    C: float
    norms: dict
    term1_intermediate: float = float("nan")

    @property
    def rhs(self) -> float:
        return self.C * (self.term1 + self.term2)

    @property
    def ratio(self) -> float:
        """LHS over the RHS with C = 1."""
        return self.lhs / (self.term1 + self.term2)

    @property
    def passed(self) -> bool:
        return self.lhs <= self.rhs

    @property
    def dominant(self) -> str:
        return "interpolation" if self.term1 >= self.term2 else "small-ball"

    def row(self) -> dict:
        return {
            "kind": self.kind,
            "r0": self.radii.r0,
            "r1": self.radii.r1,
            "R1": self.radii.R1,
            "k0": self.k0,
            "lhs": self.lhs,
            "term1": self.term1,
            "term2": self.term2,
            "C": self.C,
            "ratio": self.ratio,
            "dominant": self.dominant,
            "pass": self.passed,
        }


def three_ball_check(
    solution: ManufacturedSolution,
    radii: RadiiTriple,
    bounds: BoundInputs = BoundInputs(),
    regime: Regime = Regime(3),
    C: float = 1.0,
    sampler: NormSampler = DEFAULT_SAMPLER,
) -> ThreeBallReport:
    """Both right-hand terms of the three-ball inequality (the V-only form when ``regime.mode`` says so)."""
    _need_certificate(solution)
    n = regime.n
    K, M = bounds.K, bounds.M
    kk = k0(radii).value
    F = {name: F_factor(getattr(radii, name), K, M, regime) for name in ("r0", "r1", "R1")}
    lhs = ball_sup(solution.u, 0.75 * radii.r1, sampler=sampler)
    small = ball_sup(solution.u, 2 * radii.r0, sampler=sampler)
    big = ball_sup(solution.u, radii.R1, sampler=sampler)
    lr0, lr1, lR1 = (abs(math.log(x)) for x in (radii.r0, radii.r1, radii.R1))
    gap = phi(radii.R1 / 2) - phi(radii.r0)
    pref = F["r1"] ** (n / 2)
    expo = math.exp(min(_growth(bounds, regime) * gap, 700.0))
    if regime.mode == "V-only":
        a = lr0 * F["r0"] * small
        b = lR1 * F["R1"] * big
        term1 = pref * lr1 * a**kk * b ** (1 - kk)
        term2 = pref * (radii.R1 / radii.r1) ** (n / 2) * (lr0 / lR1) * expo * small
        inter = term1
    else:
        a = (K + lr0) * F["r0"] * small
        b = (K + lR1) * F["R1"] * big
        term1 = pref * lr1 * a**kk * b ** (1 - kk)
        term2 = pref * (radii.R1 / radii.r1) ** (n / 2) * (1 + lr0 / K) * expo * small
        # the proof's L² display, before elliptic regularity, with (1 + |log|/K)·K in place of K + |log|
        inter = pref * lr1 * ((1 + lr0 / K) * K * F["r0"] * small) ** kk * ((1 + lR1 / K) * K * F["R1"] * big) ** (1 - kk)
    return ThreeBallReport(
        solution.kind, radii, kk, F, lhs, term1, term2, C,
        {"inner": small, "middle": lhs, "outer": big}, inter,
    )


def default_triples() -> list[RadiiTriple]:
    return [
        RadiiTriple(1e-4, 2e-3, 0.01),
        RadiiTriple(5e-4, 4e-3, 0.02),
        RadiiTriple(1e-3, 5e-3, 0.04),
        RadiiTriple(1e-3, 1e-2, 0.045),
        RadiiTriple(2e-3, 1.5e-2, 0.049),
    ]


# --------------------------------------------------------------------------
# Caccioppoli


@dataclass
class CaccioppoliReport:
    kind: str
    r: float
    R: float
    lhs: float  # ‖∇u‖²_{L²(B_r)}
    bracket: float
    u_l2_sq: float
    C: float = 1.0

    @property
    def ratio(self) -> float:
        rhs = self.bracket * self.u_l2_sq
        return 0.0 if self.lhs == 0 else self.lhs / rhs

    @property
    def passed(self) -> bool:
        return self.ratio <= self.C

    def row(self) -> dict:
        return {"kind": self.kind, "r": self.r, "R": self.R, "lhs": self.lhs,
                "rhs": self.bracket * self.u_l2_sq, "ratio": self.ratio, "C": self.C, "pass": self.passed}


def caccioppoli_bracket(r: float, R: float, K: float, M: float, regime: Regime) -> float:
    n = regime.n
    out = (R - r) ** -2 + M ** (2 * _v_power(regime.t, n))
    if regime.mode != "V-only":
        out += K ** (2 * _w_power(regime.s, n))
    return out


def caccioppoli_ratio(
    solution: ManufacturedSolution,
    r: float,
    R: float,
    bounds: BoundInputs = BoundInputs(),
    regime: Regime = Regime(3),
    C: float = 1.0,
    R0: float = DEFAULT_R0,
) -> CaccioppoliReport:
    if not (0 < r < R <= R0):
        raise OrderingViolation(f"need 0 < r < R ≤ R0, got r={r}, R={R}, R0={R0}")
    lhs = gradient_l2_polar(solution, r) ** 2
    mass = ball_l2(solution.u, R) ** 2
    lhs = 0.0 if lhs <= 1e-20 * mass / (R * R) else lhs  # quadrature roundoff of a constant
    return CaccioppoliReport(
        solution.kind, r, R, lhs, caccioppoli_bracket(r, R, bounds.K, bounds.M, regime), mass, C,
    )


DEFAULT_CACC_PAIRS = ((0.01, 0.02), (0.02, 0.04), (0.03, 0.05), (0.005, 0.05), (0.04, 0.05))


# --------------------------------------------------------------------------
# vanishing order


@dataclass
class VanishingFit:
    slope: float
    intercept: float
    residual: float
    local_slopes: list
    segments: list  # [(r_lo, r_hi, slope)] of the best two-piece fit
    order_bound: float = float("nan")

    def __iter__(self) -> Iterator[float]:
        return iter((self.slope, self.intercept, self.residual))

    @property
    def within_bound(self) -> bool:
        return self.slope <= self.order_bound + 1e-9


def _lsq(x: np.ndarray, y: np.ndarray) -> tuple[float, float, float]:
    A = np.vstack([x, np.ones_like(x)]).T
    coef, *_ = np.linalg.lstsq(A, y, rcond=None)
    res = float(np.sqrt(np.mean((A @ coef - y) ** 2)))
    return float(coef[0]), float(coef[1]), res


def vanishing_order_fit(
    solution: ManufacturedSolution,
    center=(0.0, 0.0, 0.0),
    r_grid: Sequence[float] | None = None,
    regime: Regime | None = None,
    C1: float = 1.0,
    C2: float = 1.0,
    sampler: NormSampler = DEFAULT_SAMPLER,
) -> VanishingFit:
    """Least-squares slope of log‖u‖_{L^∞(B_r)} against log r."""
    r = np.asarray(r_grid if r_grid is not None else np.geomspace(1e-4, 0.05, 8), dtype=float)
    if r.size < 6:
        raise DegenerateData("need at least 6 radii")
    if np.any(r <= 0) or np.any(np.diff(r) <= 0):
        raise DegenerateData("radii must be positive and increasing")
    q = r[1:] / r[:-1]
    if np.ptp(np.log(q)) > 1e-6 * max(1.0, abs(np.log(q)).max()):
        raise DegenerateData("radii must be geometrically spaced")
    sups = np.array([ball_sup(solution.u, float(x), center, sampler) for x in r])
    if np.all(sups == 0):
        raise DegenerateData("u vanishes on every sampled ball")
    if np.any(sups == 0):
        raise DegenerateData("u vanishes on part of the radius grid")
    x, y = np.log(r), np.log(sups)
    slope, icpt, res = _lsq(x, y)
    local = list(np.diff(y) / np.diff(x))
    segments = [(float(r[0]), float(r[-1]), slope)]
    best = res
    for b in range(2, r.size - 1):  # two-piece fit, each piece ≥ 3 points
        if b + 1 > r.size - 2:
            break
        s1, _, e1 = _lsq(x[: b + 1], y[: b + 1])
        s2, _, e2 = _lsq(x[b:], y[b:])
        err = math.sqrt((e1**2 * (b + 1) + e2**2 * (r.size - b)) / (r.size + 1))
        if err < 0.5 * best:
            best = err
            segments = [(float(r[0]), float(r[b]), s1), (float(r[b]), float(r[-1]), s2)]
    bound = float("nan")
    if regime is not None:
        bound = order_bound(solution.K, solution.M, regime, C1, C2)
    return VanishingFit(slope, icpt, res, local, segments, bound)


# --------------------------------------------------------------------------
# propagation of smallness


@dataclass
class ChainStep:
    center: tuple
    ell: float  # ‖u‖_{L^∞(B_r(x_i))}
    sup3: float  # ‖u‖_{L^∞(B_{3r}(x_i))}
    bound: float  # step bound evaluated at the true ell
    D: float
    E: float
    F: float

    @property
    def holds(self) -> bool:
        return self.sup3 <= self.bound * (1 + 1e-12)


@dataclass
class ChainReport:
    r: float
    k0: float
    A: float
    steps: list
    end_value: float
    log_lower_bound: float
    first_ball: float

    @property
    def lower_bound(self) -> float:
        return math.exp(self.log_lower_bound) if self.log_lower_bound > -745 else 0.0

    @property
    def sound(self) -> bool:
        ok = self.log_lower_bound <= math.log(self.first_ball) + 1e-12 if self.first_ball > 0 else self.log_lower_bound == -math.inf
        return ok and all(s.holds for s in self.steps)


def propagation_chain(
    solution: ManufacturedSolution,
    centers: Sequence[Sequence[float]],
    r: float,
    bounds: BoundInputs = BoundInputs(),
    regime: Regime = Regime(3),
    C: float = 1.0,
    domain_radius: float = 1.0,
    sampler: NormSampler = DEFAULT_SAMPLER,
) -> ChainReport:
    """Iterate the small-radius three-ball bound (r0 = r/2, r1 = 4r, R1 = 10r) along a chain of balls.

    At each center the bound reads ‖u‖_{B_3r} ≤ A(ℓ^{k0} + ℓ) with ℓ = ‖u‖_{B_r},
    A = C(Ĉ^{1−k0} + 1)(K + |log r|)|log r| exp(C₁K^κ + C₂M^μ) and Ĉ the sup over
    the outer balls.  Composing it along the chain and inverting at the far end
    gives a lower bound for ℓ at the first center.
    """
    X = np.asarray(centers, dtype=float)
    if X.ndim != 2 or X.shape[1] != 3 or len(X) == 0:
        raise ChainGeometryError("centers must be a non-empty (d, 3) array")
    if not 0 < 10 * r < 1:
        raise ChainGeometryError("need 10r < 1")
    for i in range(len(X) - 1):
        if np.linalg.norm(X[i + 1] - X[i]) > r * (1 + 1e-12):
            raise ChainGeometryError(f"centers {i} and {i + 1} are more than r apart")
    if np.any(np.linalg.norm(X, axis=1) + 10 * r > domain_radius):
        raise ChainGeometryError("a ball B_10r(x_i) leaves the domain")
    kk = (phi(5 * r) - phi(4 * r)) / (phi(5 * r) - phi(r / 2))
    lr = abs(math.log(r))
    Chat = max(1.0, max(ball_sup(solution.u, 10 * r, x, sampler) for x in X))
    A = C * (Chat ** (1 - kk) + 1) * (bounds.K + lr) * lr * math.exp(min(_growth(bounds, regime), 700.0))

    def G(ell: float) -> float:
        return A * (ell**kk + ell)

    steps = []
    for i, x in enumerate(X):
        ell = ball_sup(solution.u, r, x, sampler)
        sup3 = ball_sup(solution.u, 3 * r, x, sampler)
        geo = sum(kk**j for j in range(i + 1))
        steps.append(ChainStep(tuple(map(float, x)), ell, sup3, G(ell), kk ** (i + 1), geo, geo))
    end = steps[-1].sup3
    d = len(X)
    logA = math.log(A)

    def compose(x: float) -> float:  # log of G∘…∘G(e^x), d times
        for _ in range(d):
            x = logA + float(np.logaddexp(kk * x, x))
        return x

    first = steps[0].ell
    target = math.log(max(end, 1e-300))
    lo, hi = -1e6, target + 1.0
    while compose(hi) < target:
        hi += 10.0
    if compose(lo) >= target:
        log_lower = -math.inf
    else:
        for _ in range(200):  # bisection in log ℓ; compose is increasing
            mid = 0.5 * (lo + hi)
            if compose(mid) >= target:
                hi = mid
            else:
                lo = mid
        log_lower = lo
    return ChainReport(r, kk, A, steps, end, log_lower, first)


# --------------------------------------------------------------------------
# calibration


@dataclass
class Calibration:
    """max observed ratio × safety, with the train/held-out split that produced it."""

    name: str
    C: float
    max_ratio: float
    train: list = field(default_factory=list)
    held_out: list = field(default_factory=list)
    held_out_failures: int = 0

    @property
    def pass_rate(self) -> float:
        n = len(self.held_out)
        return 1.0 if n == 0 else 1.0 - self.held_out_failures / n

    def as_dict(self) -> dict:
        return {"C": self.C, "max_ratio": self.max_ratio, "train": len(self.train),
                "held_out": len(self.held_out), "held_out_failures": self.held_out_failures,
                "pass_rate": self.pass_rate}


def split_half(items: Sequence, seed: int = 0) -> tuple[list, list]:
    idx = np.random.default_rng(seed).permutation(len(items))
    half = (len(items) + 1) // 2
    return [items[i] for i in sorted(idx[:half])], [items[i] for i in sorted(idx[half:])]


def calibrate(name: str, ratio_fn: Callable, items: Sequence, seed: int = 0, safety: float = SAFETY) -> Calibration:
    """Fit C on one half of ``items`` and count held-out ratios above C."""
    if not items:
        raise EmptyCorpus(f"{name}: nothing to calibrate on")
    train, held = split_half(list(items), seed)
    tr = [float(ratio_fn(x)) for x in train]
    C = safety * max(max(tr), 1e-300)
    ho = [float(ratio_fn(x)) for x in held]
    return Calibration(name, C, max(tr), tr, ho, sum(v > C for v in ho))


def calibrate_three_ball(corpus: Sequence[ManufacturedSolution], triples: Sequence[RadiiTriple] | None = None,
                         regime: Regime = Regime(3), seed: int = 0) -> Calibration:
    triples = list(triples or default_triples())

    def fn(sol):
        b = BoundInputs(K=max(sol.K, 1.0), M=max(sol.M, 1.0))
        return max(three_ball_check(sol, tr, b, regime).ratio for tr in triples)

    return calibrate("three-ball", fn, list(corpus), seed)


def calibrate_caccioppoli(corpus: Sequence[ManufacturedSolution], pairs=DEFAULT_CACC_PAIRS,
                          regime: Regime = Regime(3), seed: int = 0) -> Calibration:
    def fn(sol):
        b = BoundInputs(K=max(sol.K, 1.0), M=max(sol.M, 1.0))
        return max(caccioppoli_ratio(sol, r, R, b, regime).ratio for r, R in pairs)

    return calibrate("caccioppoli", fn, list(corpus), seed)


def calibrate_vanishing(corpus: Sequence[ManufacturedSolution], regime: Regime = Regime(3),
                        r_grid: Sequence[float] | None = None, seed: int = 0) -> Calibration:
    """C₁ = C₂ = C with fitted order ≤ C(K^κ + M^μ)."""

    def fn(sol):
        fit = vanishing_order_fit(sol, r_grid=r_grid)
        return max(fit.slope, 0.0) / order_bound(sol.K, sol.M, regime)

    return calibrate("vanishing-order", fn, list(corpus), seed)


def elliptic_regularity_ratio(solution: ManufacturedSolution, r: float, bounds: BoundInputs = BoundInputs(),
                              regime: Regime = Regime(3)) -> float:
    """‖u‖_{L^∞(B_r)} / [F(r)^{n/2} r^{−n/2} ‖u‖_{L²(B_2r)}], the elliptic-regularity step as a checkable ratio."""
    n = regime.n
    den = F_factor(r, bounds.K, bounds.M, regime) ** (n / 2) * r ** (-n / 2) * ball_l2(solution.u, 2 * r)
    return ball_sup(solution.u, r) / den


def regime_exponents(regime: Regime) -> dict:
    return exponent_set(regime).as_dict()
