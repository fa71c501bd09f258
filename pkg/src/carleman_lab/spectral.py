"""Log-polar grids, real spherical harmonics on S², and weighted norms.

A field lives on the product grid t = log r (uniform) × S² (Gauss-Legendre in
cos θ times uniform azimuth).  Spectra carry one coefficient column per
orthonormal harmonic; a spectrum may also be "synthetic" (no sphere grid),
which is how dimensions n > 3 are exercised: only degree labels and the
eigenvalue formulas k(k+n−2), k+(n−2)/2 are needed there.
"""

from __future__ import annotations

import io
import json
import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.interpolate import CubicSpline

from .errors import DegreeOverflow, DomainError, NonfiniteValue, RadiusOutOfGrid
from .kernels import legendre_table

# --------------------------------------------------------------------------
# the Carleman weight


def phi(r):
    """φ(r) = log r + log((log r)²) for 0 < r < 1."""
    r = np.asarray(r, dtype=float)
    if np.any(r <= 0) or np.any(r >= 1):
        raise DomainError("φ(r) needs 0 < r < 1")
    lr = np.log(r)
    out = lr + np.log(lr * lr)
    return float(out) if out.ndim == 0 else out


def _check_t(t):
    t = np.asarray(t, dtype=float)
    if np.any(t >= -1.0):
        raise DomainError("varphi(t) needs t < −1")
    return t


def varphi(t):
    """varphi(t) = φ(eᵗ) = t + log t²."""
    t = _check_t(t)
    out = t + np.log(t * t)
    return float(out) if out.ndim == 0 else out


def dvarphi(t):
    t = _check_t(t)
    out = 1.0 + 2.0 / t
    return float(out) if out.ndim == 0 else out


# --------------------------------------------------------------------------
# grids


@dataclass(frozen=True)
class TGrid:
    t_min: float = -12.0
    t_max: float = -3.0
    count: int = 1024

    def __post_init__(self):
        if self.count < 64:
            raise ValueError("TGrid needs count ≥ 64")
        if not self.t_min < self.t_max < -1.0:
            raise DomainError("TGrid needs t_min < t_max < −1")

    @cached_property
    def t(self) -> np.ndarray:
        return np.linspace(self.t_min, self.t_max, self.count)

    @property
    def dt(self) -> float:
        return (self.t_max - self.t_min) / (self.count - 1)

    @cached_property
    def weights(self) -> np.ndarray:
        w = np.full(self.count, self.dt)
        w[0] = w[-1] = 0.5 * self.dt
        return w

    def to_dict(self) -> dict:
        return {"t_min": self.t_min, "t_max": self.t_max, "count": self.count}


@dataclass(frozen=True)
class SphereGrid:
    """Product quadrature on S², exact for polynomials of degree 2·k_max at oversample 1.

    ``zonal=True`` keeps a single azimuth with weight 2π and only m = 0
    harmonics, which integrates axisymmetric fields exactly at a fraction of
    the cost.
    """

    k_max: int = 16
    oversample: int = 1
    zonal: bool = False
    n: int = 3

    def __post_init__(self):
        if self.n != 3:
            raise ValueError("sphere grids are built for n = 3 only; use synthetic spectra for n > 3")
        if self.k_max < 0 or self.oversample < 1:
            raise ValueError("k_max ≥ 0 and oversample ≥ 1 required")

    @property
    def n_theta(self) -> int:
        return self.oversample * (self.k_max + 1)

    @property
    def n_phi(self) -> int:
        return 1 if self.zonal else self.oversample * (2 * self.k_max + 2)

    @property
    def exactness(self) -> int:
        if self.zonal:
            return 2 * self.n_theta - 1
        return min(2 * self.n_theta - 1, self.n_phi - 1)

    @cached_property
    def _gl(self):
        return np.polynomial.legendre.leggauss(self.n_theta)

    @cached_property
    def cos_theta(self) -> np.ndarray:
        return np.repeat(self._gl[0], self.n_phi)

    @cached_property
    def azimuth(self) -> np.ndarray:
        return np.tile(2.0 * np.pi * np.arange(self.n_phi) / self.n_phi, self.n_theta)

    @cached_property
    def weights(self) -> np.ndarray:
        return np.repeat(self._gl[1], self.n_phi) * (2.0 * np.pi / self.n_phi)

    @property
    def size(self) -> int:
        return self.n_theta * self.n_phi

    @cached_property
    def points(self) -> np.ndarray:
        ct = self.cos_theta
        st = np.sqrt(np.clip(1.0 - ct * ct, 0.0, None))
        return np.stack([st * np.cos(self.azimuth), st * np.sin(self.azimuth), ct], axis=1)

    @cached_property
    def degrees(self) -> np.ndarray:
        if self.zonal:
            return np.arange(self.k_max + 1)
        return np.concatenate([np.full(2 * k + 1, k) for k in range(self.k_max + 1)])

    @cached_property
    def orders(self) -> np.ndarray:
        if self.zonal:
            return np.zeros(self.k_max + 1, dtype=int)
        return np.concatenate([np.arange(-k, k + 1) for k in range(self.k_max + 1)])

    @property
    def n_modes(self) -> int:
        return self.degrees.shape[0]

    def mode_index(self, k: int, m: int = 0) -> int:
        if k > self.k_max or abs(m) > k:
            raise DegreeOverflow(f"(k={k}, m={m}) outside grid with k_max={self.k_max}")
        if self.zonal:
            if m != 0:
                raise DegreeOverflow("zonal grids carry m = 0 only")
            return k
        return k * k + k + m

    @cached_property
    def Y(self) -> np.ndarray:
        """Real orthonormal harmonics at the nodes, shape (n_nodes, n_modes)."""
        return real_harmonics(self.k_max, self.points, self.degrees, self.orders)

    @cached_property
    def _analysis(self) -> np.ndarray:
        return self.weights[:, None] * self.Y

    def to_dict(self) -> dict:
        return {"k_max": self.k_max, "oversample": self.oversample, "zonal": self.zonal, "n": self.n}


def real_harmonics(k_max: int, points: np.ndarray, degrees=None, orders=None) -> np.ndarray:
    """Real orthonormal spherical harmonics Y_{k,m} at unit vectors ``points``.

    Convention: m > 0 ↦ √2 P̄_k^m cos mφ, m < 0 ↦ √2 P̄_k^{|m|} sin |m|φ.
    """
    points = np.asarray(points, dtype=float)
    if degrees is None:
        degrees = np.concatenate([np.full(2 * k + 1, k) for k in range(k_max + 1)])
        orders = np.concatenate([np.arange(-k, k + 1) for k in range(k_max + 1)])
    z = np.clip(points[:, 2], -1.0, 1.0)
    az = np.arctan2(points[:, 1], points[:, 0])
    P = legendre_table(k_max, z)
    out = np.empty((points.shape[0], len(degrees)))
    for col, (k, m) in enumerate(zip(degrees, orders)):
        if m == 0:
            out[:, col] = P[:, k, 0]
        elif m > 0:
            out[:, col] = math.sqrt(2.0) * P[:, k, m] * np.cos(m * az)
        else:
            out[:, col] = math.sqrt(2.0) * P[:, k, -m] * np.sin(-m * az)
    return out


# --------------------------------------------------------------------------
# fields and spectra


@dataclass(frozen=True, eq=False)
class PolarField:
    tgrid: TGrid
    sgrid: SphereGrid
    values: np.ndarray  # (Nt, Nω) complex

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.complex128)
        if v.shape != (self.tgrid.count, self.sgrid.size):
            raise ValueError(f"values shape {v.shape} does not match grids")
        object.__setattr__(self, "values", v)

    def with_values(self, values) -> "PolarField":
        return PolarField(self.tgrid, self.sgrid, values)

    def support_ok(self, tol: float = 1e-12) -> bool:
        scale = max(np.abs(self.values).max(), 1e-300)
        edge = max(np.abs(self.values[0]).max(), np.abs(self.values[-1]).max())
        return edge <= tol * scale

    # serialization -------------------------------------------------------
    def header(self) -> dict:
        return {"tgrid": self.tgrid.to_dict(), "sgrid": self.sgrid.to_dict(), "format": "polarfield/1"}

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("# " + json.dumps(self.header(), sort_keys=True) + "\n")
        buf.write("t_index,omega_index,re,im\n")
        it, iw = np.indices(self.values.shape)
        for a, b, re, im in zip(it.ravel(), iw.ravel(), self.values.real.ravel(), self.values.imag.ravel()):
            buf.write(f"{a},{b},{re:.17g},{im:.17g}\n")
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "PolarField":
        lines = text.splitlines()
        hdr = json.loads(lines[0][2:])
        tg = TGrid(**hdr["tgrid"])
        sg = SphereGrid(**hdr["sgrid"])
        data = np.loadtxt(lines[2:], delimiter=",", ndmin=2)
        vals = np.zeros((tg.count, sg.size), dtype=np.complex128)
        vals[data[:, 0].astype(int), data[:, 1].astype(int)] = data[:, 2] + 1j * data[:, 3]
        return cls(tg, sg, vals)


@dataclass(frozen=True, eq=False)
class HarmonicSpectrum:
    tgrid: TGrid
    degrees: np.ndarray  # (n_modes,)
    coeffs: np.ndarray  # (Nt, n_modes) complex
    n: int = 3
    sgrid: SphereGrid | None = None

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=np.complex128)
        d = np.asarray(self.degrees, dtype=int)
        if c.shape != (self.tgrid.count, d.shape[0]):
            raise ValueError(f"coeffs shape {c.shape} does not match ({self.tgrid.count}, {d.shape[0]})")
        if self.sgrid is not None and (self.sgrid.n_modes != d.shape[0] or self.n != 3):
            raise ValueError("spectrum does not match its sphere grid")
        object.__setattr__(self, "coeffs", c)
        object.__setattr__(self, "degrees", d)

    def with_coeffs(self, coeffs) -> "HarmonicSpectrum":
        return HarmonicSpectrum(self.tgrid, self.degrees, coeffs, self.n, self.sgrid)

    @property
    def k_max(self) -> int:
        return int(self.degrees.max()) if self.degrees.size else 0


Field = PolarField | HarmonicSpectrum


def single_mode(tgrid: TGrid, g: np.ndarray, k: int, n: int = 3) -> HarmonicSpectrum:
    """Synthetic spectrum g(t)·Y_k for any dimension n (no sphere grid)."""
    return HarmonicSpectrum(tgrid, np.array([k]), np.asarray(g, dtype=np.complex128)[:, None], n)


def analyze(field: PolarField) -> HarmonicSpectrum:
    coeffs = field.values @ field.sgrid._analysis
    return HarmonicSpectrum(field.tgrid, field.sgrid.degrees, coeffs, 3, field.sgrid)


def synthesize(spec: HarmonicSpectrum) -> PolarField:
    if spec.sgrid is None:
        raise DegreeOverflow("synthetic spectra have no sphere grid to synthesize on")
    return PolarField(spec.tgrid, spec.sgrid, spec.coeffs @ spec.sgrid.Y.T)


def as_spectrum(field: Field) -> HarmonicSpectrum:
    return field if isinstance(field, HarmonicSpectrum) else analyze(field)


def as_field(field: Field) -> PolarField:
    return field if isinstance(field, PolarField) else synthesize(field)


def project(field: Field, k: int) -> Field:
    spec = as_spectrum(field)
    if k > spec.k_max and (spec.sgrid is None or k > spec.sgrid.k_max):
        raise DegreeOverflow(f"degree {k} exceeds k_max {spec.k_max}")
    mask = (spec.degrees == k)[None, :]
    out = spec.with_coeffs(spec.coeffs * mask)
    return out if isinstance(field, HarmonicSpectrum) else synthesize(out)


# --------------------------------------------------------------------------
# norms


@dataclass(frozen=True)
class WeightedNormSpec:
    """‖|log r|^a e^{−τφ(r)} r^b u‖_{L^p(r^{−n}dx)}."""

    p: float = 2.0
    a: int = 0
    b: float = 0.0
    tau: float = 0.0

    def __post_init__(self):
        if not self.p > 1.0:
            raise ValueError("p must lie in (1, ∞]")
        if self.tau < 0:
            raise ValueError("tau ≥ 0 required")

    def log_weight(self, t: np.ndarray) -> np.ndarray:
        lw = self.b * t
        if self.a:
            lw = lw + self.a * np.log(np.abs(t))
        if self.tau:
            lw = lw - self.tau * varphi(t)
        return lw


def _log_lp(logw: np.ndarray, slice_pow: np.ndarray, wt: np.ndarray, p: float) -> float:
    """log( Σ_i wt_i e^{p·logw_i} S_i )^{1/p} with S_i ≥ 0, shift-stabilized."""
    live = slice_pow > 0
    if not np.any(live):
        return -math.inf
    m = logw[live].max()
    total = np.sum(wt[live] * np.exp(p * (logw[live] - m)) * slice_pow[live])
    return m + math.log(total) / p


def log_weighted_norm(field: Field, spec: WeightedNormSpec, t_weight: np.ndarray | None = None) -> float:
    """Natural log of weighted_norm; never overflows.

    ``t_weight`` multiplies the integrand by an extra positive function of t
    (used for potentials that depend on r only).
    """
    tg = field.tgrid
    logw = spec.log_weight(tg.t)
    if t_weight is not None:
        with np.errstate(divide="ignore"):
            logw = logw + np.log(np.abs(t_weight))
    if math.isinf(spec.p):
        if isinstance(field, HarmonicSpectrum) and field.sgrid is None:
            raise ValueError("sup norms need a sphere grid")
        vals = np.abs(as_field(field).values).max(axis=1)
        live = vals > 0
        if not np.any(live):
            return -math.inf
        return float(np.max(logw[live] + np.log(vals[live])))
    p = float(spec.p)
    if p == 2.0 and isinstance(field, HarmonicSpectrum):
        slice_pow = np.sum(np.abs(field.coeffs) ** 2, axis=1)
    else:
        f = as_field(field)
        slice_pow = np.abs(f.values) ** p @ f.sgrid.weights
    return _log_lp(logw, slice_pow, tg.weights, p)


def weighted_norm(field: Field, spec: WeightedNormSpec = WeightedNormSpec(), t_weight=None) -> float:
    ln = log_weighted_norm(field, spec, t_weight)
    if ln == -math.inf:
        return 0.0
    if ln > 700.0:
        raise NonfiniteValue(f"weighted norm overflows (log value {ln:.1f}); rescale the field")
    return math.exp(ln)


def angular_gradient_norm(field: Field, t_weight: np.ndarray | None = None) -> float:
    """(Σ_k k(k+n−2)‖w(t) v_k‖²_{L²(dtdω)})^{1/2} from the spectrum."""
    spec = as_spectrum(field)
    lam = spec.degrees * (spec.degrees + spec.n - 2.0)
    slice_pow = np.abs(spec.coeffs) ** 2 @ lam
    if t_weight is not None:
        slice_pow = slice_pow * np.abs(t_weight) ** 2
    return float(math.sqrt(max(np.sum(spec.tgrid.weights * slice_pow), 0.0)))


def cartesian_ball_norm(field: PolarField, p: float, radius: float) -> float:
    """‖u‖_{L^p(B_radius)} with dx = e^{nt} dt dω; the grid below t_min counts as zero."""
    tg = field.tgrid
    if not 0 < radius <= math.exp(tg.t_max) * (1 + 1e-12):
        raise RadiusOutOfGrid(f"radius {radius} outside (0, e^t_max = {math.exp(tg.t_max)}]")
    L = min(math.log(radius), tg.t_max)
    if L <= tg.t_min:
        return 0.0
    t = tg.t
    vals = field.values
    if math.isinf(p):
        inside = t <= L
        best = np.abs(vals[inside]).max() if np.any(inside) else 0.0
        edge = CubicSpline(t, vals, axis=0)(L)  # radial refinement at the reported radius
        return float(max(best, np.abs(edge).max()))
    n = 3
    radial = (np.abs(vals) ** p @ field.sgrid.weights) * np.exp(n * t)
    integral = CubicSpline(t, radial).integrate(tg.t_min, L)
    return float(max(integral, 0.0) ** (1.0 / p))
