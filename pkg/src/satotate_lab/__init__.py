"""Smoothed Sato-Tate statistics: periodic weights, Chebyshev-Hecke algebra,
elliptic-curve family moments and level-1 eigenform checks."""

from .chebyshev import ChebyshevExpansion, DTable, MeasureSpec, cheb_eval, cheb_product, d_table
from .curves import ApCache, ApRecord, Curve, ap, prime_window, read_cache, sweep, write_cache
from .elliptic_stats import MomentReport, family_moments, n_phi_direct, n_phi_fourier, s_average
from .kernels import PeriodicWeight, SmoothKernel, periodic_weight
from .modular_forms import EigenformQExpansion, eigenform, n_phi_f_identity_check, trace_residual

__version__ = "0.1.0"

__all__ = [
    "ApCache",
    "ApRecord",
    "ChebyshevExpansion",
    "Curve",
    "DTable",
    "EigenformQExpansion",
    "MeasureSpec",
    "MomentReport",
    "PeriodicWeight",
    "SmoothKernel",
    "ap",
    "cheb_eval",
    "cheb_product",
    "d_table",
    "eigenform",
    "family_moments",
    "n_phi_direct",
    "n_phi_f_identity_check",
    "n_phi_fourier",
    "periodic_weight",
    "prime_window",
    "read_cache",
    "s_average",
    "sweep",
    "trace_residual",
    "write_cache",
]
