"""Numerical laboratory for quantitative unique continuation with singular lower-order terms.

Modules: ``exponents`` (exponent calculus), ``spectral`` (log-polar grids and
spherical harmonics), ``operators`` (first-order factorization and the L⁻_τ
solver), ``corpus`` (test fields, potentials, manufactured solutions),
``carleman`` (inequality checks and τ-sweeps), ``uniqueness`` (three-ball,
Caccioppoli, vanishing order), ``infinity`` (rescaling and M(R)) and ``cli``.
"""

from ._backend import BACKEND
from .errors import CarlemanLabError
from .exponents import Regime, exponent_set

__version__ = "0.1.0"

__all__ = ["BACKEND", "CarlemanLabError", "Regime", "exponent_set", "__version__"]
