"""Closed-form exponent calculus for the unique-continuation theorems.

Every formula is evaluated through the reciprocals ``1/s`` and ``1/t`` so that
``s = inf`` or ``t = inf`` is handled by the algebraic limit rather than by
special cases.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import EpsilonOutOfRange, InadmissibleRegime, RTooSmall, RangeViolation

MODES = ("VW", "W-only", "V-only")

# VW case tags (closed endpoints follow the theorem statement)
CASE_T_GE_S = "t>=s"
CASE_MID = "sn/(s+n)<t<s"
CASE_LOW = "t<=sn/(s+n)"
# V-only case tags
CASE_V_HIGH = "t>n"
CASE_V_LOW = "t<=n"
# W-only has a single branch
CASE_W = "W-only"

_TIE_RTOL = 1e-12


def _recip(x: float) -> float:
    return 0.0 if math.isinf(x) else 1.0 / x


def _le(a: float, b: float) -> bool:
    """a <= b with a relative tie window, used only for branch selection."""
    return a <= b or math.isclose(a, b, rel_tol=_TIE_RTOL, abs_tol=0.0)


@dataclass(frozen=True)
class Regime:
    n: int
    s: float = math.inf
    t: float = math.inf
    mode: str = "VW"
    eps: float | None = None

    def __post_init__(self):
        if self.mode not in MODES:
            raise InadmissibleRegime(f"unknown mode {self.mode!r}", "mode")
        if int(self.n) != self.n or self.n < 3:
            raise InadmissibleRegime("n ≥ 3 required", "n ≥ 3")
        for name in ("s", "t"):
            v = getattr(self, name)
            if not (v > 0):
                raise InadmissibleRegime(f"{name} must lie in (0, ∞]", f"{name} > 0")

    @property
    def sigma(self) -> float:
        return _recip(self.s)

    @property
    def theta(self) -> float:
        return _recip(self.t)


@dataclass(frozen=True)
class ExponentSet:
    kappa: float
    mu: float
    p: float
    q: float
    beta0: float
    beta1: float
    Pi: float
    eps: float = 0.0
    case: str = ""
    beta0_2: float = field(default=float("nan"))

    def as_dict(self) -> dict:
        return {
            "case": self.case,
            "kappa": self.kappa,
            "mu": self.mu,
            "p": self.p,
            "q": self.q,
            "beta0": self.beta0,
            "beta0_2": self.beta0_2,
            "beta1": self.beta1,
            "Pi": self.Pi,
            "eps": self.eps,
        }


@dataclass(frozen=True)
class BoundInputs:
    K: float = 1.0
    M: float = 1.0
    A0: float = 1.0
    A1: float = 1.0
    C0: float = 1.0
    Chat: float = 1.0
    C1: float = 1.0
    C2: float = 1.0

    def __post_init__(self):
        for name in ("K", "M", "A0", "A1", "C0", "Chat"):
            if not getattr(self, name) >= 1.0:
                raise RangeViolation(f"{name} ≥ 1 required, got {getattr(self, name)}")
        for name in ("C1", "C2"):
            if not getattr(self, name) > 0.0:
                raise RangeViolation(f"{name} > 0 required, got {getattr(self, name)}")


# --------------------------------------------------------------------------
# admissibility and classification


def check_admissible(regime: Regime) -> None:
    n, sg, th = regime.n, regime.sigma, regime.theta
    if regime.mode in ("VW", "W-only"):
        # s > (3n-2)/2  <=>  1/s < 2/(3n-2)
        if not sg < 2.0 / (3 * n - 2):
            raise InadmissibleRegime(
                f"s ≤ (3n−2)/2: s = {regime.s} must exceed {(3 * n - 2) / 2}", "s > (3n−2)/2"
            )
    if regime.mode == "VW":
        bound = n * (3 * n - 2) / (5 * n - 2)
        if not th < 1.0 / bound:
            raise InadmissibleRegime(
                f"t ≤ n(3n−2)/(5n−2): t = {regime.t} must exceed {bound}", "t > n(3n−2)/(5n−2)"
            )
    if regime.mode == "V-only":
        bound = 4 * n * n / (7 * n + 2)
        if not th < 1.0 / bound:
            raise InadmissibleRegime(
                f"t ≤ 4n²/(7n+2): t = {regime.t} must exceed {bound}", "t > 4n²/(7n+2)"
            )


def classify(regime: Regime) -> str:
    check_admissible(regime)
    n, sg, th = regime.n, regime.sigma, regime.theta
    if regime.mode == "W-only":
        return CASE_W
    if regime.mode == "V-only":
        # t > n  <=>  1/t < 1/n ; the tie t = n belongs to the closed branch
        return CASE_V_LOW if _le(1.0 / n, th) else CASE_V_HIGH
    # t >= s  <=>  1/t <= 1/s
    if _le(th, sg):
        return CASE_T_GE_S
    # t <= sn/(s+n)  <=>  1/t >= 1/n + 1/s
    if _le(1.0 / n + sg, th):
        return CASE_LOW
    return CASE_MID


def eps_supremum(n: int, t: float) -> float:
    """Upper limit for ε in the V-only branch t ≤ n."""
    return min((7 * t + 2 * t / n - 4 * n) / 2.0, (2 * t - n) * (n + 2) / (2.0 * n))


def default_eps(n: int, t: float) -> float:
    return 0.5 * eps_supremum(n, t)


def resolve_eps(regime: Regime) -> float:
    if regime.mode != "V-only" or classify(regime) != CASE_V_LOW:
        return 0.0
    sup = eps_supremum(regime.n, regime.t)
    eps = default_eps(regime.n, regime.t) if regime.eps is None else float(regime.eps)
    if not 0.0 < eps < sup:
        raise EpsilonOutOfRange(f"ε must lie in (0, {sup}), got {eps}")
    return eps


# --------------------------------------------------------------------------
# exponents


def kappa(regime: Regime) -> float:
    case = classify(regime)
    if regime.mode == "V-only":
        raise InadmissibleRegime("κ is defined only in VW and W-only modes", "mode ∈ {VW, W-only}")
    n, sg, th = regime.n, regime.sigma, regime.theta
    if case == CASE_LOW:
        return 4.0 / ((5.0 - 2.0 / n) - (3 * n - 2) * th)
    return 4.0 / (2.0 - (3 * n - 2) * sg)


def mu(regime: Regime) -> float:
    case = classify(regime)
    n, sg, th = regime.n, regime.sigma, regime.theta
    if regime.mode == "W-only":
        raise InadmissibleRegime("μ is defined only in VW and V-only modes", "mode ∈ {VW, V-only}")
    if regime.mode == "V-only":
        if case == CASE_V_HIGH:
            return 4.0 / (6.0 - (3 * n - 2) * th)
        eps = resolve_eps(regime)
        return 4.0 / (7.0 + 2.0 / n - (4 * n + eps) * th)
    if case == CASE_T_GE_S:
        return 4.0 / (6.0 - (3 * n - 2) * sg)
    if case == CASE_MID:
        return 4.0 / (6.0 + (n + 2) * sg - 4 * n * th)
    return 4.0 / ((5.0 - 2.0 / n) - (3 * n - 2) * th)


def carleman_pq(regime: Regime) -> tuple[float, float]:
    case = classify(regime)
    n, sg, th = regime.n, regime.sigma, regime.theta
    if regime.mode == "V-only":
        if case == CASE_V_HIGH:
            return 2.0 / (1.0 + 2.0 * th), 2.0
        eps = resolve_eps(regime)
        p = 2.0 * n / (n + 2.0 - 2.0 * n * eps * th / (n + 2.0))
        q = p / (1.0 - p * th)  # pt/(t-p)
        return p, q
    p_s = 2.0 / (1.0 + 2.0 * sg)  # 2s/(s+2)
    if regime.mode == "W-only" or case == CASE_T_GE_S:
        return p_s, 2.0
    if case == CASE_MID:
        return p_s, 2.0 / (1.0 + 2.0 * sg - 2.0 * th)  # 2st/(st+2t-2s)
    return 2.0 * n / (n - 2.0 + 2.0 * n * th), 2.0 * n / (n - 2.0)


def beta(n: int, p: float, q: float) -> tuple[float, float]:
    lo, hi = 2.0 * n / (n + 2), 2.0 * n / (n - 2)
    tol = 1e-12
    if not (lo < p <= 2.0 + tol and 2.0 - tol <= q <= hi + tol):
        raise RangeViolation(f"need 2n/(n+2) < p ≤ 2 ≤ q ≤ 2n/(n−2); got p={p}, q={q}")
    corr = (3 * n - 2) * (2.0 - p) / (8.0 * p)
    b1 = 0.5 - corr
    b0 = 1.5 - corr - n * (q - 2.0) / (2.0 * q)
    return b0, b1


def lp_lemma_beta(n: int, p: float) -> float:
    """Exponent of the L^p to L^2 first-order lemma."""
    return -0.5 + (3 * n - 2) * (2.0 - p) / (8.0 * p)


def pi_exponent(regime: Regime) -> float:
    case = classify(regime)
    n, sg, th = regime.n, regime.sigma, regime.theta
    if regime.mode == "W-only":
        return kappa(regime) * (1.0 - n * sg)
    if regime.mode == "V-only":
        if case == CASE_V_HIGH:
            return 4.0 * (2.0 - n * th) / (6.0 - (3 * n - 2) * th)
        eps = resolve_eps(regime)
        return 4.0 * (2.0 - n * th) / (7.0 + 2.0 / n - (4 * n + eps) * th)
    if case in (CASE_T_GE_S, CASE_MID):
        # 4(s-n)/(2s-(3n-2)) whenever t > sn/(s+n)
        return 4.0 * (1.0 - n * sg) / (2.0 - (3 * n - 2) * sg)
    # lowest branch: kappa(1 - n/s) with the lowest-branch kappa
    return 4.0 * (1.0 - n * sg) / ((5.0 - 2.0 / n) - (3 * n - 2) * th)


def exponent_set(regime: Regime) -> ExponentSet:
    case = classify(regime)
    eps = resolve_eps(regime)
    p, q = carleman_pq(regime)
    b0, b1 = beta(regime.n, p, q)
    b0_2, _ = beta(regime.n, p, 2.0)
    k = kappa(regime) if regime.mode != "V-only" else 0.0
    m = mu(regime) if regime.mode != "W-only" else 0.0
    return ExponentSet(
        kappa=k, mu=m, p=p, q=q, beta0=b0, beta1=b1, Pi=pi_exponent(regime), eps=eps, case=case, beta0_2=b0_2
    )


def tau_threshold(exps: ExponentSet, bounds: BoundInputs, mode: str = "VW") -> float:
    total = 0.0
    if mode in ("VW", "W-only"):
        total += bounds.C1 * bounds.K ** exps.kappa
    if mode in ("VW", "V-only"):
        total += bounds.C2 * bounds.M ** exps.mu
    return total


def mr_lower_bound(R: float, Pi: float, C: float) -> float:
    if not R > math.e:
        raise RTooSmall(f"R ≤ e (R = {R}); the bound needs log R > 1")
    if not C > 0:
        raise RangeViolation("C > 0 required")
    return math.exp(-C * R**Pi * math.log(R))


def log_mr_lower_bound(R: float, Pi: float, C: float) -> float:
    """Natural log of mr_lower_bound; finite even when the bound underflows."""
    if not R > math.e:
        raise RTooSmall(f"R ≤ e (R = {R}); the bound needs log R > 1")
    return -C * R**Pi * math.log(R)
