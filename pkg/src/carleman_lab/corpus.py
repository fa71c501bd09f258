"""Manufactured test functions, solutions and singular potentials.

Test functions are separable sums  v(t, ω) = Σ_j g_j(t) Σ_{k,m} c_{j,km} Y_{km}(ω)
whose spectra are known exactly, so realizations never pass through
quadrature.  Every object also evaluates in Cartesian coordinates, which is
what the independent finite-difference oracles consume.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.special import spherical_jn

from .errors import DegreeOverflow, EmptyCorpus, NotInSpace, UBelowFloor
from .spectral import (
    HarmonicSpectrum,
    PolarField,
    SphereGrid,
    TGrid,
    real_harmonics,
    synthesize,
    varphi,
)

# --------------------------------------------------------------------------
# radial profiles in t


def bump(t, center: float, width: float) -> np.ndarray:
    """C∞ bump exp(1 − 1/(1−x²)), x = (t − center)/width, supported on |x| < 1."""
    x = (np.asarray(t, dtype=float) - center) / width
    out = np.zeros_like(x)
    inside = np.abs(x) < 1.0
    out[inside] = np.exp(1.0 - 1.0 / (1.0 - x[inside] ** 2))
    return out


def smooth_step(x) -> np.ndarray:
    """C∞ transition from 0 (x ≤ 0) to 1 (x ≥ 1)."""
    x = np.asarray(x, dtype=float)
    a = np.where(x > 0, np.exp(-1.0 / np.where(x > 0, x, 1.0)), 0.0)
    b = np.where(x < 1, np.exp(-1.0 / np.where(x < 1, 1.0 - x, 1.0)), 0.0)
    return a / (a + b)


def window(t, lo: float, hi: float, ramp: float) -> np.ndarray:
    """Plateau cutoff: 0 outside (lo, hi), 1 on [lo+ramp, hi−ramp]."""
    t = np.asarray(t, dtype=float)
    return smooth_step((t - lo) / ramp) * smooth_step((hi - t) / ramp)


@dataclass(frozen=True)
class Profile:
    """A named radial profile g(t); ``params`` fully determine it."""

    kind: str
    params: tuple

    def __call__(self, t) -> np.ndarray:
        p = dict(self.params)
        t = np.asarray(t, dtype=float)
        if self.kind == "bump":
            return bump(t, p["center"], p["width"])
        if self.kind == "cut-power":  # e^{kt} · window
            return np.exp(p["k"] * t) * window(t, p["lo"], p["hi"], p["ramp"])
        if self.kind == "packet":
            return _packet(t, p)
        raise ValueError(f"unknown profile {self.kind}")

    def to_dict(self) -> dict:
        return {"kind": self.kind, **dict(self.params)}


def _packet(t: np.ndarray, p: dict) -> np.ndarray:
    """Physical-frame profile whose conjugate e^{−τ₀φ}v is a Gaussian centered at t_c."""
    tau0, tc, a = p["tau"], p["center"], p["a"]
    tt = np.clip(t, None, -1.5)
    logv = tau0 * (varphi(tt) - varphi(tc)) - a * (tt - tc) ** 2
    out = np.exp(np.minimum(logv, 700.0))
    return out * window(t, p["lo"], p["hi"], p["ramp"])


# --------------------------------------------------------------------------
# test functions


@dataclass(frozen=True, eq=False)
class TestFunction:
    kind: str
    params: dict
    k_max: int
    zonal: bool
    components: tuple  # ((Profile, coeff vector over modes of SphereGrid(k_max, zonal)), ...)

    __test__ = False  # keep pytest from collecting this class

    def sphere_grid(self, oversample: int = 1) -> SphereGrid:
        return SphereGrid(self.k_max, oversample, self.zonal)

    def spectrum(self, tgrid: TGrid, sgrid: SphereGrid | None = None) -> HarmonicSpectrum:
        sg = sgrid or self.sphere_grid()
        if sg.zonal != self.zonal and not self.zonal:
            raise DegreeOverflow("non-zonal field on a zonal grid")
        if sg.k_max < self.k_max:
            raise DegreeOverflow(f"field degree {self.k_max} exceeds grid k_max {sg.k_max}")
        base = SphereGrid(self.k_max, 1, self.zonal)
        coeffs = np.zeros((tgrid.count, sg.n_modes), dtype=np.complex128)
        cols = np.array([sg.mode_index(int(k), int(m)) for k, m in zip(base.degrees, base.orders)])
        for prof, c in self.components:
            coeffs[:, cols] += prof(tgrid.t)[:, None] * np.asarray(c)[None, :]
        return HarmonicSpectrum(tgrid, sg.degrees, coeffs, 3, sg)

    def realize(self, tgrid: TGrid, oversample: int = 1) -> PolarField:
        return synthesize(self.spectrum(tgrid, self.sphere_grid(oversample)))

    def evaluate(self, points: np.ndarray) -> np.ndarray:
        """Cartesian evaluation at points of shape (..., 3)."""
        pts = np.asarray(points, dtype=float)
        flat = pts.reshape(-1, 3)
        r = np.linalg.norm(flat, axis=1)
        base = SphereGrid(self.k_max, 1, self.zonal)
        Y = real_harmonics(self.k_max, flat / r[:, None], base.degrees, base.orders)
        t = np.log(r)
        out = np.zeros(flat.shape[0], dtype=np.complex128)
        for prof, c in self.components:
            out += prof(t) * (Y @ np.asarray(c))
        return out.reshape(pts.shape[:-1])

    def to_dict(self) -> dict:
        return {"kind": self.kind, **{k: _jsonable(v) for k, v in self.params.items()}}


def _jsonable(v):
    if isinstance(v, (np.floating, np.integer)):
        return v.item()
    if isinstance(v, np.ndarray):
        return v.tolist()
    return v


def _unit(k_max: int, zonal: bool, k: int, m: int) -> np.ndarray:
    sg = SphereGrid(k_max, 1, zonal)
    c = np.zeros(sg.n_modes)
    c[sg.mode_index(k, m)] = 1.0
    return c


def bump_mode(k: int, m: int, t_center: float, width: float, zonal: bool | None = None) -> TestFunction:
    """``gaussian-bump-mode`` in the corpus vocabulary: a compact C∞ bump times Y_{k,m}."""
    zonal = (m == 0) if zonal is None else zonal
    prof = Profile("bump", (("center", float(t_center)), ("width", float(width))))
    return TestFunction(
        "gaussian-bump-mode",
        {"k": k, "m": m, "t_center": t_center, "width": width},
        k,
        zonal,
        ((prof, _unit(k, zonal, k, m)),),
    )


def cut_harmonic(k: int, m: int, tgrid: TGrid, ramp: float = 1.5) -> TestFunction:
    """r^k Y_{k,m} cut off smoothly inside the t-grid."""
    lo, hi = tgrid.t_min, tgrid.t_max
    prof = Profile("cut-power", (("k", float(k)), ("lo", lo), ("hi", hi), ("ramp", ramp)))
    zonal = m == 0
    return TestFunction("harmonic", {"k": k, "m": m, "ramp": ramp}, k, zonal, ((prof, _unit(k, zonal, k, m)),))


def radial_profile(profile: Profile) -> TestFunction:
    return TestFunction("radial-profile", profile.to_dict(), 0, True, ((profile, np.array([1.0])),))


def random_bandlimited(seed: int, k_max: int, tgrid: TGrid, n_bumps: int = 2) -> TestFunction:
    rng = np.random.default_rng(seed)
    sg = SphereGrid(k_max)
    comps = []
    for _ in range(n_bumps):
        width = rng.uniform(3.0, 3.75)
        center = rng.uniform(tgrid.t_min + width + 0.05, tgrid.t_max - width - 0.05)
        c = rng.normal(size=sg.n_modes) / (1.0 + sg.degrees)
        comps.append((Profile("bump", (("center", center), ("width", width))), c))
    return TestFunction("random-bandlimited", {"seed": seed, "k_max": k_max}, k_max, False, tuple(comps))


def resonant_packet(
    tau: float,
    t_center: float,
    tgrid: TGrid,
    band: int = 0,
    ramp: float = 0.75,
    width_factor: float = 1.0,
    k_shift: int = 0,
) -> TestFunction:
    """Zonal packet adapted to the weight at parameter τ.

    Its conjugate e^{−τφ}v is a sum over degrees k of Gaussians
    exp(−a(t − t_k)²), a = τ/(width_factor²·t_c²), centered at the resonance
    points t_k where τφ′(t_k) = k (or at t_c when degree k has no resonance in
    the grid).  ``band`` sets how many degrees on each side of the central
    one are included, with zonal reproducing-kernel weights (2k+1)/4π, so
    band > 0 also concentrates the field in angle.
    """
    k0 = max(0, int(round(tau * (1.0 + 2.0 / t_center))) + k_shift)
    ks = [k for k in range(k0 - band, k0 + band + 1) if k >= 0]
    comps = []
    a = tau / (width_factor * t_center) ** 2
    lo, hi = tgrid.t_min + 1.0, tgrid.t_max - 0.5
    for k in ks:
        tk = -2.0 * tau / (tau - k) if k < tau else t_center
        if not lo <= tk <= hi:
            tk = t_center
        prof = Profile(
            "packet",
            (("tau", float(tau)), ("center", float(tk)), ("a", a), ("lo", tgrid.t_min), ("hi", tgrid.t_max), ("ramp", ramp)),
        )
        w = math.sqrt((2 * k + 1) / (4 * math.pi)) if band else 1.0
        comps.append((prof, w * _unit(max(ks), True, k, 0)))
    return TestFunction(
        "resonant-packet",
        {"tau": tau, "t_center": t_center, "band": band, "width_factor": width_factor, "k_shift": k_shift},
        max(ks),
        True,
        tuple(comps),
    )


# --------------------------------------------------------------------------
# corpora


def carleman_corpus(size: int, seed: int, tgrid: TGrid) -> list[TestFunction]:
    """Fixed (τ-independent) fields: bump modes, cut harmonics, random band-limited."""
    if size <= 0:
        raise EmptyCorpus("corpus size must be positive")
    rng = np.random.default_rng(seed)
    out: list[TestFunction] = []
    i = 0
    while len(out) < size:
        kind = i % 3
        if kind == 0:
            k = int(rng.integers(0, 9))
            w = float(rng.uniform(3.0, 4.0))
            c = float(rng.uniform(tgrid.t_min + w + 0.05, tgrid.t_max - w - 0.05))
            out.append(bump_mode(k, 0, c, w))
        elif kind == 1:
            out.append(cut_harmonic(int(rng.integers(0, 6)), 0, tgrid))
        else:
            out.append(random_bandlimited(int(rng.integers(0, 2**31 - 1)), int(rng.integers(2, 7)), tgrid))
        i += 1
    return out


def factorization_corpus(seed: int, tgrid: TGrid, size: int = 32) -> list[TestFunction]:
    rng = np.random.default_rng(seed)
    out: list[TestFunction] = []
    for i in range(size):
        if i % 2 == 0:
            k = int(rng.integers(0, 17))
            m = int(rng.integers(-k, k + 1))
            w = float(rng.uniform(3.0, 4.0))
            c = float(rng.uniform(tgrid.t_min + w + 0.05, tgrid.t_max - w - 0.05))
            out.append(bump_mode(k, m, c, w, zonal=False))
        else:
            out.append(random_bandlimited(int(rng.integers(0, 2**31 - 1)), int(rng.integers(1, 9)), tgrid))
    return out


def manifest(items: list, paths: list[str] | None = None) -> list[dict]:
    out = []
    for i, it in enumerate(items):
        entry = {"index": i, **it.to_dict()}
        if paths is not None:
            entry["path"] = paths[i]
        out.append(entry)
    return out


def corpus_hash(items: list) -> str:
    text = json.dumps(manifest(items), sort_keys=True, default=_jsonable)
    return hashlib.sha256(text.encode()).hexdigest()


# --------------------------------------------------------------------------
# singular potentials


@dataclass(frozen=True)
class SingularPotential:
    """c·min(|x − center|^{−α}, cap); ``vector=True`` points it along x̂ (a drift W)."""

    alpha: float
    exponent: float
    c: float = 1.0
    cap: float = 1e6
    center: tuple = (0.0, 0.0, 0.0)
    vector: bool = False
    radius: float = 0.05

    def magnitude(self, points: np.ndarray) -> np.ndarray:
        pts = np.asarray(points, dtype=float)
        rr = np.linalg.norm(pts - np.asarray(self.center), axis=-1)
        return self.radial(rr)

    def radial(self, rr) -> np.ndarray:
        rr = np.asarray(rr, dtype=float)
        if self.alpha == 0:
            return np.full_like(rr, self.c)
        with np.errstate(divide="ignore"):
            return self.c * np.minimum(np.where(rr > 0, rr, 0.0) ** (-self.alpha), self.cap)

    def __call__(self, points: np.ndarray) -> np.ndarray:
        pts = np.asarray(points, dtype=float)
        mag = self.magnitude(pts)
        if not self.vector:
            return mag
        d = pts - np.asarray(self.center)
        nrm = np.linalg.norm(d, axis=-1, keepdims=True)
        return mag[..., None] * np.where(nrm > 0, d / np.where(nrm > 0, nrm, 1.0), 0.0)

    @property
    def r_cap(self) -> float:
        return 0.0 if self.alpha == 0 else self.cap ** (-1.0 / self.alpha)

    def norm(self, rho: float | None = None, p: float | None = None) -> float:
        """Closed-form ‖·‖_{L^p(B_ρ(center))}, n = 3."""
        rho = self.radius if rho is None else rho
        p = self.exponent if p is None else p
        if math.isinf(p):
            return float(self.radial(np.array([0.0 if self.alpha else rho]))[0])
        if self.alpha == 0:
            return self.c * (4.0 * math.pi * rho**3 / 3.0) ** (1.0 / p)
        rc = self.r_cap
        e = 3.0 - self.alpha * p
        inner = (self.c * self.cap) ** p * min(rho, rc) ** 3 / 3.0
        outer = 0.0
        if rho > rc:
            outer = self.c**p * (rho**e - rc**e) / e
        return (4.0 * math.pi * (inner + outer)) ** (1.0 / p)

    def norm_quadrature(self, rho: float | None = None, p: float | None = None, nodes: int = 400) -> float:
        """Same norm by Gauss-Legendre in log r on [log r_cap, log ρ] plus the capped core."""
        rho = self.radius if rho is None else rho
        p = self.exponent if p is None else p
        if math.isinf(p) or self.alpha == 0:
            return self.norm(rho, p)
        rc = min(self.r_cap, rho)
        core = (self.c * self.cap) ** p * 4.0 * math.pi * rc**3 / 3.0
        shell = 0.0
        if rho > rc:
            x, w = np.polynomial.legendre.leggauss(nodes)
            a, b = math.log(rc), math.log(rho)
            s = 0.5 * (b - a) * x + 0.5 * (b + a)
            r = np.exp(s)
            shell = 0.5 * (b - a) * np.sum(w * self.radial(r) ** p * 4.0 * math.pi * r**3)
        return float((core + shell) ** (1.0 / p))

    def to_dict(self) -> dict:
        return {
            "kind": "singular-potential",
            "alpha": self.alpha,
            "exponent": self.exponent,
            "c": self.c,
            "cap": self.cap,
            "vector": self.vector,
            "radius": self.radius,
            "certified_norm": self.norm(),
        }


def make_singular_potential(
    alpha: float,
    space_exponent: float,
    target_norm: float,
    radius: float = 0.05,
    cap: float = 1e6,
    vector: bool = False,
    n: int = 3,
) -> SingularPotential:
    if not math.isinf(space_exponent) and alpha * space_exponent >= n:
        raise NotInSpace(f"α·p = {alpha * space_exponent} ≥ n = {n}: |x|^(−α) is not in L^p")
    if math.isinf(space_exponent) and alpha > 0:
        raise NotInSpace("|x|^(−α) with α > 0 is unbounded near its center; it is not in L^∞ without the cap")
    unit = SingularPotential(alpha, space_exponent, 1.0, cap, vector=vector, radius=radius)
    return SingularPotential(alpha, space_exponent, target_norm / unit.norm(), cap, vector=vector, radius=radius)


# --------------------------------------------------------------------------
# manufactured solutions


def _zero_scalar(points):
    return np.zeros(np.asarray(points).shape[:-1])


def _zero_vector(points):
    return np.zeros(np.asarray(points).shape)


@dataclass(eq=False)
class ManufacturedSolution:
    kind: str
    params: dict
    u: Callable  # points (..., 3) -> values (...)
    grad: Callable  # points -> (..., 3)
    lap: Callable  # points -> (...)
    W: Callable = _zero_vector
    V: Callable = _zero_scalar
    order: float = 0.0  # vanishing order at the origin
    K: float = 1.0  # certified ‖W‖ bound (≥ 1 as the theorems require)
    M: float = 1.0  # certified ‖V‖ bound
    residual_certificate: float = field(default=float("nan"))
    support: tuple = (0.0, 0.05)  # radial annulus where the equation is certified

    def residual(self, points: np.ndarray) -> np.ndarray:
        g = self.grad(points)
        w = self.W(points)
        return self.lap(points) + np.sum(w * g, axis=-1) + self.V(points) * self.u(points)

    def certify(self, samples: int = 4000, seed: int = 0) -> float:
        hi = self.support[1] if math.isfinite(self.support[1]) else 100.0  # global solutions: a large ball
        pts = sample_shell(self.support[0], hi, samples, seed)
        scale = max(np.abs(self.u(pts)).max(), 1e-300)
        self.residual_certificate = float(np.abs(self.residual(pts)).max() / scale)
        return self.residual_certificate

    def realize(self, tgrid: TGrid, sgrid: SphereGrid) -> PolarField:
        r = np.exp(tgrid.t)[:, None, None]
        pts = r * sgrid.points[None, :, :]
        return PolarField(tgrid, sgrid, self.u(pts))

    def to_dict(self) -> dict:
        return {"kind": self.kind, **self.params, "K": self.K, "M": self.M, "residual": self.residual_certificate}


def sample_shell(r_lo: float, r_hi: float, count: int, seed: int = 0) -> np.ndarray:
    rng = np.random.default_rng(seed)
    d = rng.normal(size=(count, 3))
    d /= np.linalg.norm(d, axis=1, keepdims=True)
    r = rng.uniform(max(r_lo, 1e-9), r_hi, size=count)
    return d * r[:, None]


def fd_laplacian(fn: Callable, points: np.ndarray, h: float | np.ndarray) -> np.ndarray:
    """Independent second-order 7-point Cartesian Laplacian."""
    pts = np.asarray(points, dtype=float)
    h = np.asarray(h, dtype=float)
    hh = h[..., None] if h.ndim else h
    c = fn(pts)
    acc = -6.0 * c
    for j in range(3):
        e = np.zeros(3)
        e[j] = 1.0
        acc = acc + fn(pts + hh * e) + fn(pts - hh * e)
    return acc / (h * h)


def fd_gradient(fn: Callable, points: np.ndarray, h: float) -> np.ndarray:
    pts = np.asarray(points, dtype=float)
    out = []
    for j in range(3):
        e = np.zeros(3)
        e[j] = h
        out.append((fn(pts + e) - fn(pts - e)) / (2 * h))
    return np.stack(out, axis=-1)


def _harmonic_eval(k: int, m: int):

    def u(points):
        pts = np.asarray(points, dtype=float)
        flat = pts.reshape(-1, 3)
        r = np.linalg.norm(flat, axis=1)
        safe = np.where(r > 0, r, 1.0)
        Y = real_harmonics(k, flat / safe[:, None], np.array([k]), np.array([m]))[:, 0]
        val = r**k * Y if k else np.full(r.shape, Y[0] if Y.size else 0.0)
        if k == 0:
            val = np.full(r.shape, 1.0 / math.sqrt(4 * math.pi))
        return val.reshape(pts.shape[:-1])

    return u


def make_harmonic(k: int, m: int = 0, k_max: int = 16) -> ManufacturedSolution:
    """u = r^k Y_{k,m}, a harmonic polynomial; W = V = 0."""
    if k > k_max or abs(m) > k:
        raise DegreeOverflow(f"(k={k}, m={m}) outside k_max={k_max}")
    u = _harmonic_eval(k, m)

    def grad(points):
        return fd_gradient(u, points, 1e-6)

    sol = ManufacturedSolution(
        "harmonic", {"k": k, "m": m}, u, grad, _zero_scalar, order=float(k)
    )
    sol.residual_certificate = 0.0
    return sol


def make_eigen_style(spec: dict, t_exp: float = math.inf, support: tuple = (0.0, 0.05)) -> ManufacturedSolution:
    """Solutions of Δu + Vu = 0 with V := −Δu/u (closed forms only).

    spec["kind"]:
      ``sinc``      u = sin(a r)/(a r), V ≡ a²
      ``constant``  u ≡ 1, V ≡ 0
      ``radial``    u = 1 + Σ_j c_j r^{2j} with c_j ≥ 0 (``coeffs``)
      ``helmholtz`` u = j_k(a r) Y_{k,m}, V ≡ a²; vanishes to order k at 0
    """
    kind = spec["kind"]
    if kind == "sinc":
        a = float(spec["a"])

        def u(p):
            r = np.linalg.norm(p, axis=-1)
            return np.sinc(a * r / math.pi)

        def lap(p):
            return -a * a * u(p)

        V = _const(a * a)
        order = 0.0
    elif kind == "constant":

        def u(p):
            return np.ones(np.asarray(p).shape[:-1])

        def lap(p):
            return np.zeros(np.asarray(p).shape[:-1])

        V = _zero_scalar
        order = 0.0
    elif kind == "radial":
        cs = [float(c) for c in spec["coeffs"]]
        if any(c < 0 for c in cs):
            raise UBelowFloor("radial coefficients must be ≥ 0 to keep u positive")

        def u(p):
            r2 = np.sum(np.asarray(p) ** 2, axis=-1)
            return 1.0 + sum(c * r2 ** (j + 1) for j, c in enumerate(cs))

        def lap(p):
            r2 = np.sum(np.asarray(p) ** 2, axis=-1)
            return sum(c * (2 * j + 2) * (2 * j + 3) * r2**j for j, c in enumerate(cs))

        def V(p):
            return -lap(p) / u(p)

        order = 0.0
    elif kind == "helmholtz":
        a, k, m = float(spec["a"]), int(spec["k"]), int(spec.get("m", 0))
        if abs(m) > k:
            raise DegreeOverflow(f"|m| = {abs(m)} > k = {k}")

        def u(p):
            pts = np.asarray(p, dtype=float)
            flat = pts.reshape(-1, 3)
            r = np.linalg.norm(flat, axis=1)
            safe = np.where(r > 0, r, 1.0)
            Y = real_harmonics(k, flat / safe[:, None], np.array([k]), np.array([m]))[:, 0]
            return (spherical_jn(k, a * r) * Y).reshape(pts.shape[:-1])

        def lap(p):
            return -a * a * u(p)

        V = _const(a * a)
        order = float(k)
    else:
        raise ValueError(f"unknown eigen-style kind {kind!r}")

    def grad(p):
        return fd_gradient(u, p, 1e-6)

    sol = ManufacturedSolution(kind, dict(spec), u, grad, lap, V=V, order=order, support=support)
    if kind in ("sinc", "radial", "constant"):
        pts = sample_shell(support[0], support[1], 2000, 1)
        vals = np.abs(u(pts))
        if vals.min() < 1e-3 * vals.max():
            raise UBelowFloor(f"min|u| = {vals.min():.3g} < 1e-3·max|u| on the support annulus")
    sol.M = max(1.0, potential_norm(V, t_exp, support[1]))
    sol.certify()
    return sol


def _const(c: float):
    def V(p):
        return np.full(np.asarray(p).shape[:-1], c)

    return V


def potential_norm(V: Callable, p: float, radius: float, nodes: int = 48) -> float:
    """‖V‖_{L^p(B_radius)} by spherical product Gauss quadrature (n = 3)."""
    x, w = np.polynomial.legendre.leggauss(nodes)
    r = 0.5 * radius * (x + 1.0)
    wr = 0.5 * radius * w * r * r
    sg = SphereGrid(nodes // 2)
    pts = r[:, None, None] * sg.points[None, :, :]
    vals = np.abs(V(pts))
    if math.isinf(p):
        return float(vals.max())
    return float(np.sum(wr[:, None] * sg.weights[None, :] * vals**p) ** (1.0 / p))


def harmonic_corpus(k_max: int = 6) -> list[ManufacturedSolution]:
    out = []
    for k in range(k_max + 1):
        for m in sorted({0, k, -k}):
            out.append(make_harmonic(k, m))
    return out


def eigen_corpus(t_exp: float = math.inf, support: tuple = (0.0, 0.05)) -> list[ManufacturedSolution]:
    """Closed-form solutions of Δu + Vu = 0 with V ≠ 0: Helmholtz modes, sinc, positive radial."""
    specs = [{"kind": "helmholtz", "a": a, "k": k, "m": 0} for a in (5.0, 20.0) for k in range(4)]
    specs += [{"kind": "sinc", "a": 10.0}, {"kind": "radial", "coeffs": [1.0, 0.5]}, {"kind": "constant"}]
    return [make_eigen_style(s, t_exp, support) for s in specs]
