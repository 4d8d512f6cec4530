"""Second-order central-difference residuals of the model operators.

Every residual here is a plain stencil applied to a callable; nothing is
time-stepped.  Evaluation points are kept at least two steps away from the
singular axes ``r = 0`` and ``s = 0`` instead of switching to one-sided
stencils, so all residuals share the same ``O(h^2)`` truncation order.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import DomainError
from .kernels import RadialPoint

__all__ = [
    "StencilConfig",
    "bessel_apply",
    "grushin_residual",
    "neumann_trace",
    "ou_residual",
    "riccati_check",
    "pflow_radial_residual",
    "richardson_slopes",
]


@dataclass(frozen=True)
class StencilConfig:
    h_r: float = 1e-3
    h_s: float = 1e-3
    h_t: float = 1e-3
    scheme: str = "central-2nd-order"

    def __post_init__(self):
        if not (self.h_r > 0 and self.h_s > 0 and self.h_t > 0):
            raise DomainError("stencil steps must be positive")
        if self.scheme != "central-2nd-order":
            raise DomainError(f"unsupported scheme {self.scheme!r}")

    @classmethod
    def uniform(cls, h: float) -> "StencilConfig":
        return cls(h, h, h)


def _d1(f, x, h):
    return (f(x + h) - f(x - h)) / (2.0 * h)


def _d2(f, x, h):
    return (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h)


def _check_axis(x: float, h: float, name: str) -> None:
    if x <= 2.0 * h:
        raise DomainError(f"{name} = {x:g} is within two steps ({h:g}) of the axis")


def bessel_apply(f: Callable[[float], float], r: float, a: float, h: float) -> float:
    """``f''(r) + (a/r) f'(r)`` by central differences."""
    if not h > 0:
        raise DomainError("step must be positive")
    if r <= 2.0 * h:
        warnings.warn(f"step {h:g} is large relative to r = {r:g}", RuntimeWarning, stacklevel=2)
    return _d2(f, r, h) + a / r * _d1(f, r, h)


def grushin_residual(u: Callable[[float, float, float], float], alpha: float, k: int,
                     at: RadialPoint, cfg: StencilConfig) -> float:
    """``u_t - u_rr - ((2 alpha - 1)/r) u_r - (r^2/4)(u_ss + ((k-1)/s) u_s)`` at ``at``.

    ``u`` is a function of the radii ``(r, s, t)``.  For ``k = 1`` the vertical
    part is just ``u_ss``; ``s`` may then be any value, otherwise it must stay
    two steps away from zero.
    """
    r, s, t = at.r, at.s, at.t
    _check_axis(r, cfg.h_r, "r")
    if k > 1:
        _check_axis(s, cfg.h_s, "s")
    u_t = _d1(lambda x: u(r, s, x), t, cfg.h_t)
    radial = bessel_apply(lambda x: u(x, s, t), r, 2.0 * alpha - 1.0, cfg.h_r)
    vertical = _d2(lambda x: u(r, x, t), s, cfg.h_s)
    if k > 1:
        vertical += (k - 1.0) / s * _d1(lambda x: u(r, x, t), s, cfg.h_s)
    return u_t - radial - 0.25 * r * r * vertical


def neumann_trace(u: Callable[[float], float], alpha: float, r_probe: Sequence[float],
                  rel_step: float = 1e-4) -> list[float]:
    """``r^(2 alpha - 1) u'(r)`` at each probe radius.

    The derivative uses a central difference with step ``rel_step * r``, so the
    stencil never reaches the axis.
    """
    out = []
    for r in r_probe:
        if not r > 0:
            raise DomainError("probe radii must be positive")
        out.append(r ** (2.0 * alpha - 1.0) * _d1(u, r, rel_step * r))
    return out


def ou_residual(u: Callable[[np.ndarray, float], float], omega: float, x: Sequence[float], t: float,
                cfg: StencilConfig) -> float:
    """``u_t - Lap u + 2 omega <x, grad u>`` on ``R^m`` at ``(x, t)``.

    Uses ``cfg.h_r`` in every space direction and ``cfg.h_t`` in time.
    """
    x = np.asarray(x, dtype=float)
    h = cfg.h_r
    u_t = _d1(lambda tt: u(x, tt), t, cfg.h_t)
    lap = 0.0
    drift = 0.0
    for i in range(x.size):
        e = np.zeros_like(x)
        e[i] = 1.0
        line = lambda y: u(x + (y - x[i]) * e, t)  # noqa: E731
        lap += _d2(line, x[i], h)
        drift += x[i] * _d1(line, x[i], h)
    return u_t - lap + 2.0 * omega * drift


def riccati_check(h: Callable, Phi: Callable, f: Callable, alpha: float, at: tuple[float, float],
                  cfg: StencilConfig) -> tuple[float, float, float]:
    """Residuals of the exponential transform ``v = exp(-h) f``.

    Returns ``(res_riccati, res_v, res_f)`` with, for ``B = d_rr + ((2 alpha - 1)/r) d_r``,

    * ``res_riccati = h_t - B h + (h_r)^2 - Phi``
    * ``res_v = v_t - B v + Phi v``
    * ``res_f = f_t - B f + 2 h_r f_r``

    For exact derivatives ``res_v + v * res_riccati = exp(-h) * res_f``.
    """
    r, t = at
    _check_axis(r, cfg.h_r, "r")
    a = 2.0 * alpha - 1.0

    def v(rr, tt):
        return math.exp(-h(rr, tt)) * f(rr, tt)

    def resid(g):
        return _d1(lambda x: g(r, x), t, cfg.h_t) - bessel_apply(lambda x: g(x, t), r, a, cfg.h_r)

    h_r = _d1(lambda x: h(x, t), r, cfg.h_r)
    res_riccati = resid(h) + h_r * h_r - Phi(r, t)
    res_v = resid(v) + Phi(r, t) * v(r, t)
    res_f = resid(f) + 2.0 * h_r * _d1(lambda x: f(x, t), r, cfg.h_r)
    return res_riccati, res_v, res_f


def pflow_radial_residual(f: Callable[[float, float], float], n: int, p: float,
                          at: tuple[float, float], cfg: StencilConfig) -> float:
    """``f_t - (p-1) f_rr - ((n-1)/r) f_r``: the radial normalised p-Laplacian flow."""
    if not p > 1:
        raise DomainError("p must exceed 1")
    r, t = at
    _check_axis(r, cfg.h_r, "r")
    line = lambda x: f(x, t)  # noqa: E731
    return (_d1(lambda x: f(r, x), t, cfg.h_t) - (p - 1.0) * _d2(line, r, cfg.h_r)
            - (n - 1.0) / r * _d1(line, r, cfg.h_r))


def richardson_slopes(residual: Callable[[float], float], steps: Sequence[float]) -> list[float]:
    """Observed orders ``log(|R(h_i)| / |R(h_(i+1))|) / log(h_i / h_(i+1))`` for consecutive steps."""
    vals = [abs(residual(h)) for h in steps]
    return [math.log(vals[i] / vals[i + 1]) / math.log(steps[i] / steps[i + 1])
            for i in range(len(steps) - 1)]
