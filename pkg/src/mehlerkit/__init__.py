"""Mehler-type kernels for Baouendi-Grushin operators and numerical checks of their identities.

Modules
-------
specfun
    gamma, scaled Bessel ``I``, Bessel ``J``, Gauss ``2F1``, sphere integrals.
quadrature
    adaptive Gauss-Kronrod integration and the radial Fourier reduction.
kernels
    ``G_{alpha,beta}``, the generalized Mehler kernel ``K_{alpha,k}``, the
    Ornstein-Uhlenbeck kernel, p-flow prototypes and conformal energies.
diffops
    finite-difference residuals of the associated operators.
verify
    identity suites producing reproducible reports.
cli
    ``mehlerkit eval | verify | table``.
"""

from .errors import DomainError, MehlerError, OverflowGuardError, PoleError, QuadratureError
from .kernels import KernelParams, PFlowParams, RadialPoint
from .quadrature import EvalResult, QuadConfig

__version__ = "0.1.0"

__all__ = [
    "DomainError",
    "MehlerError",
    "OverflowGuardError",
    "PoleError",
    "QuadratureError",
    "KernelParams",
    "PFlowParams",
    "RadialPoint",
    "EvalResult",
    "QuadConfig",
]
