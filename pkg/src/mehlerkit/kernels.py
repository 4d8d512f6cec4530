"""Mehler-type heat kernels for Grushin operators, the Gaveau-Hulanicki kernel and relatives.

All kernels are radial in both the horizontal variable ``z`` and the
vertical variable ``sigma``, so the public functions take the radii
``r = |z|`` and ``s = |sigma|`` (see :func:`radial_point` for the vector
adapter).  Every ``R^k`` Fourier integral is reduced to a one-dimensional
Bessel-weighted integral by :func:`~mehlerkit.quadrature.bochner_radial_ft`;
the phase convention ``exp(-(i/t)<sigma, lambda>)`` corresponds to the
frequency ``|sigma| / (2 pi t)``.  Both phase signs give the same real
cosine transform for radial integrands.

Exponential factors (Bessel growth against Gaussian damping) are combined in
log space before exponentiation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import DomainError, OverflowGuardError
from .quadrature import (
    EvalResult,
    QuadConfig,
    bochner_radial_ft,
    integrate_adaptive,
    integrate_semiinfinite,
    integrate_time_profile,
)
from .specfun import bessel_i_scaled, gamma, log_bessel_i_reduced, sphere_area

__all__ = [
    "KernelParams",
    "RadialPoint",
    "PFlowParams",
    "radial_point",
    "gauge",
    "mehler_g",
    "gh_kernel",
    "mehler_kernel_k",
    "kernel_k_at_pole",
    "kernel_k_integrand",
    "pole_dominating_bound",
    "ou_mehler_kernel",
    "hat_propagator",
    "hat_propagator_zero_frequency",
    "cauchy_solve_k1",
    "chapman_kolmogorov_k1",
    "gp_euclid",
    "gp_euclid_energy",
    "gp_heisenberg",
    "gp_heisenberg_energy",
    "heisenberg_energy_constant",
    "energy_numeric",
    "energy_closed",
    "conformal_constant",
]

_LOG_GUARD = 700.0


@dataclass(frozen=True)
class KernelParams:
    alpha: float
    beta: float
    k: int

    def __post_init__(self):
        if not self.alpha > 0:
            raise DomainError(f"alpha must be positive, got {self.alpha}")
        if not self.beta > self.alpha:
            raise DomainError(f"beta must exceed alpha, got beta={self.beta}, alpha={self.alpha}")
        if int(self.k) != self.k or self.k < 1:
            raise DomainError(f"k must be a positive integer, got {self.k}")

    def homogeneity_degree(self) -> float:
        return -2.0 * self.beta

    def fractal_dimension(self) -> float:
        return 2.0 * self.alpha


@dataclass(frozen=True)
class RadialPoint:
    r: float
    s: float
    t: float

    def __post_init__(self):
        for name in ("r", "s", "t"):
            v = getattr(self, name)
            if not math.isfinite(v):
                raise DomainError(f"{name} must be finite")
        if self.r < 0 or self.s < 0:
            raise DomainError("radii must be nonnegative")
        if not self.t > 0:
            raise DomainError("time must be positive")

    def dilate(self, ell: float) -> "RadialPoint":
        """Image under the heat dilation ``(r, s, t) -> (l r, l^2 s, l^2 t)``."""
        return RadialPoint(ell * self.r, ell * ell * self.s, ell * ell * self.t)


@dataclass(frozen=True)
class PFlowParams:
    """Dimension data for the normalised p-Laplacian flow prototypes.

    Euclidean case: ``n >= 2`` and ``p > 1``.  Heisenberg case
    (``heisenberg=True``): ``H^n`` with ``n >= 1``, homogeneous dimension
    ``Q = 2n + 2`` and ``1 < p < Q``.
    """

    n: int
    p: float
    heisenberg: bool = False

    def __post_init__(self):
        if int(self.n) != self.n:
            raise DomainError("n must be an integer")
        if not self.p > 1:
            raise DomainError("p must exceed 1")
        if self.heisenberg:
            if self.n < 1:
                raise DomainError("Heisenberg group index n must be >= 1")
            if not self.p < self.Q:
                raise DomainError(f"need p < Q = {self.Q}")
        else:
            if self.n < 2:
                raise DomainError("Euclidean dimension n must be >= 2")
            if not self.kappa > 1:
                raise DomainError("fractal dimension must exceed 1")

    @property
    def Q(self) -> int:
        return 2 * self.n + 2

    @property
    def kappa(self) -> float:
        return (self.n + self.p - 2.0) / (self.p - 1.0)

    @property
    def alpha(self) -> float:
        return (self.Q - self.p) / (2.0 * (self.p - 1.0))

    @property
    def beta(self) -> float:
        return (self.Q + self.p - 2.0) / (2.0 * (self.p - 1.0))


def radial_point(z: Sequence[float], sigma: Sequence[float], t: float) -> RadialPoint:
    """Reduce vector coordinates ``(z, sigma, t)`` to their radii."""
    return RadialPoint(float(np.linalg.norm(z)), float(np.linalg.norm(sigma)), float(t))


def gauge(r: float, s: float) -> float:
    """Koranyi-Folland gauge ``(r^4 + 16 s^2)^(1/4)``."""
    return (r ** 4 + 16.0 * s * s) ** 0.25


# ---------------------------------------------------------------------------
# elementary pieces with their lambda -> 0 limits supplied analytically


def _log_x_over_sinh(x):
    x = np.abs(np.asarray(x, dtype=float))
    small = x < 1e-3
    xs = np.where(small, 1.0, x)
    big = np.log(2.0 * xs) - xs - np.log1p(-np.exp(-2.0 * xs))
    x2 = x * x
    return np.where(small, -x2 / 6.0 + x2 * x2 / 180.0, big)


def _x_coth(x):
    x = np.abs(np.asarray(x, dtype=float))
    small = x < 1e-3
    xs = np.where(small, 1.0, x)
    x2 = x * x
    return np.where(small, 1.0 + x2 / 3.0 - x2 * x2 / 45.0, xs / np.tanh(xs))


def _scale_hint(a: float) -> float:
    # width over which exp(-a (lambda coth lambda - 1)) falls off
    return 1.0 if a <= 3.0 else math.sqrt(3.0 / a)


def _unscaled_cfg(cfg: QuadConfig, factor: float) -> QuadConfig:
    # abs_tol is stated in kernel units; the transform is computed before the prefactor
    return cfg.with_(abs_tol=cfg.abs_tol / factor) if cfg.abs_tol > 0 else cfg


def _scaled(res: EvalResult, factor: float) -> EvalResult:
    return EvalResult(res.value * factor, res.err_estimate * abs(factor), res.n_evals,
                      res.converged, res.cutoff)


# ---------------------------------------------------------------------------
# G_{alpha,beta} and the Gaveau-Hulanicki kernel


def mehler_g(params: KernelParams, pt: RadialPoint, cfg: QuadConfig | None = None) -> EvalResult:
    """Two-parameter Mehler kernel ``G*_{alpha,beta}((r, sigma), t)``.

    ``(2^k / (4 pi t)^beta)`` times the ``R^k`` Fourier transform, at frequency
    ``s / (2 pi t)``, of ``(l/sinh l)^alpha exp(-(r^2/4t) l coth l)``.
    """
    cfg = cfg or QuadConfig()
    alpha, beta, k = params.alpha, params.beta, params.k
    a = pt.r * pt.r / (4.0 * pt.t)

    def f(lam):
        return np.exp(alpha * _log_x_over_sinh(lam) - a * _x_coth(lam))

    pref = 2.0 ** k / (4.0 * math.pi * pt.t) ** beta
    ft = bochner_radial_ft(f, k, pt.s / (2.0 * math.pi * pt.t), _unscaled_cfg(cfg, pref),
                           scale=_scale_hint(a))
    return _scaled(ft, pref)


def gh_kernel(m: int, k: int, pt: RadialPoint, cfg: QuadConfig | None = None) -> EvalResult:
    """Gaveau-Hulanicki heat kernel of a Heisenberg-type group, ``G_{m/2, m/2+k}``."""
    if int(m) != m or m < 2:
        raise DomainError("horizontal dimension m must be an integer >= 2")
    return mehler_g(KernelParams(0.5 * m, 0.5 * m + k, k), pt, cfg)


# ---------------------------------------------------------------------------
# generalized Mehler kernel K_{alpha,k}


def _log_k_integrand(alpha, r, rho, t, lam):
    # log of (r rho)^(1-alpha) (l/sinh l) exp(-l coth l (r^2+rho^2)/4t) I_{alpha-1}(w),
    # w = l rho r / (2t sinh l); (r rho)^(1-alpha) (w/2)^(alpha-1) = (4t sinh l / l)^(1-alpha)
    lxs = _log_x_over_sinh(lam)
    w = (rho * r / (2.0 * t)) * np.exp(lxs)
    a = (r * r + rho * rho) / (4.0 * t)
    return lxs - a * _x_coth(lam) + (1.0 - alpha) * (math.log(4.0 * t) - lxs) \
        + log_bessel_i_reduced(alpha - 1.0, w)


def kernel_k_integrand(alpha: float, k: int, r: float, rho: float, t: float, lam):
    """Modulus of the ``lambda``-integrand of the generalized Mehler kernel.

    Includes the prefactor ``1 / (pi^k (2t)^(k+1))``; the oscillating phase is
    omitted (it has modulus one).
    """
    lam = np.asarray(lam, dtype=float)
    return np.exp(_log_k_integrand(alpha, r, rho, t, lam)) / (math.pi ** k * (2.0 * t) ** (k + 1))


def pole_dominating_bound(alpha: float, k: int, r: float, t: float, lam):
    """Integrable majorant of :func:`kernel_k_integrand` valid for ``rho r / 2t <= 1``.

    ``C / (pi^k (2t)^(k+alpha)) exp(-r^2/4t) (l/sinh l)^alpha`` with
    ``C = I_{alpha-1}(1)``, the best constant in ``I_nu(x) <= C x^nu`` on ``[0, 1]``.
    """
    lam = np.asarray(lam, dtype=float)
    c = math.exp(log_bessel_i_reduced(alpha - 1.0, 1.0) - (alpha - 1.0) * math.log(2.0))
    return c / (math.pi ** k * (2.0 * t) ** (k + alpha)) * np.exp(
        -r * r / (4.0 * t) + alpha * _log_x_over_sinh(lam))


def mehler_kernel_k(alpha: float, k: int, r: float, rho: float, s, t: float,
                    cfg: QuadConfig | None = None) -> EvalResult:
    """Generalized Mehler kernel ``K_{alpha,k}((r, sigma), (rho, sigma'), t)``.

    ``s = |sigma' - sigma|``.  ``s`` may be an array; all values then share one
    adaptive panel set and the result value is an array.  ``rho = 0`` is
    accepted and evaluates the pointwise pole limit of the integrand.
    """
    cfg = cfg or QuadConfig()
    if not alpha > 0:
        raise DomainError("alpha must be positive")
    if int(k) != k or k < 1:
        raise DomainError("k must be a positive integer")
    if r < 0 or rho < 0 or not t > 0:
        raise DomainError("need r, rho >= 0 and t > 0")
    a = (r * r + rho * rho) / (4.0 * t)
    if a > _LOG_GUARD:
        raise OverflowGuardError(f"(r^2+rho^2)/(4t) = {a:g} exceeds the supported range")

    def f(lam):
        return np.exp(_log_k_integrand(alpha, r, rho, t, lam))

    s_arr = np.asarray(s, dtype=float)
    pref = 1.0 / (math.pi ** k * (2.0 * t) ** (k + 1))
    ft = bochner_radial_ft(f, k, s_arr / (2.0 * math.pi * t), _unscaled_cfg(cfg, pref),
                           scale=_scale_hint(a))
    return _scaled(ft, pref)


def kernel_k_at_pole(alpha: float, k: int, pt: RadialPoint, cfg: QuadConfig | None = None) -> EvalResult:
    """Pole value ``K_{alpha,k}((r, sigma), (0, 0), t) = (2 pi^alpha / Gamma(alpha)) G*_{alpha,alpha+k}``."""
    pref = 2.0 * math.pi ** alpha / gamma(alpha)
    return _scaled(mehler_g(KernelParams(alpha, alpha + k, k), pt, cfg), pref)


# ---------------------------------------------------------------------------
# Ornstein-Uhlenbeck and the fixed-frequency propagator


def ou_mehler_kernel(m: int, omega: float, x, y, t: float):
    """Mehler kernel of ``u_t - Lap u + 2 omega <x, grad u> = 0`` on ``R^m``.

    ``(4 pi)^(-m/2) e^(m t omega) (2 omega / sinh(2 t omega))^(m/2)
    exp(-omega |e^(t omega) y - e^(-t omega) x|^2 / (2 sinh(2 t omega)))``,
    evaluated in the algebraically equivalent overflow-free form.  ``y`` may
    carry leading batch dimensions (shape ``(..., m)``).
    """
    if not (omega > 0 and t > 0):
        raise DomainError("need omega > 0 and t > 0")
    if m * t * omega > _LOG_GUARD:
        raise OverflowGuardError("m t omega exceeds the supported range")
    x = np.asarray(x, dtype=float).reshape(m)
    y = np.asarray(y, dtype=float)
    if y.shape[-1] != m:
        y = y[..., None] if m == 1 else y
    d = -math.expm1(-4.0 * t * omega)  # 1 - e^{-4 t omega}
    shifted = y - math.exp(-2.0 * t * omega) * x
    sq = np.sum(shifted * shifted, axis=-1)
    out = (omega / (math.pi * d)) ** (0.5 * m) * np.exp(-omega * sq / d)
    return float(out) if np.ndim(out) == 0 else out


def hat_propagator(alpha: float, lam: float, r: float, rho: float, t: float) -> float:
    """Fixed-frequency radial propagator of the partial Fourier transform.

    ``exp(-(2 pi l / tanh(2 t pi l)) (r^2 + rho^2)/4) r^(1-alpha) rho^alpha
    (pi l / sinh(2 t pi l)) I_{alpha-1}(pi l rho r / sinh(2 t pi l))``;
    integrate against ``phi_hat(rho, l) d rho`` to propagate data.
    """
    if not (alpha > 0 and lam >= 0 and r > 0 and rho > 0 and t > 0):
        raise DomainError("hat_propagator needs alpha, r, rho, t > 0 and lam >= 0")
    u = 2.0 * t * math.pi * lam
    lxs = float(_log_x_over_sinh(u))
    z = rho * r / (2.0 * t) * math.exp(lxs)
    a = (r * r + rho * rho) / (4.0 * t)
    if a > _LOG_GUARD:
        raise OverflowGuardError("(r^2+rho^2)/(4t) exceeds the supported range")
    logv = (-a * float(_x_coth(u)) + (1.0 - alpha) * math.log(r) + alpha * math.log(rho)
            - math.log(2.0 * t) + lxs + math.log(bessel_i_scaled(alpha - 1.0, z)) + z)
    return math.exp(logv)


def hat_propagator_zero_frequency(alpha: float, r: float, rho: float, t: float) -> float:
    """``lam -> 0`` limit of :func:`hat_propagator`: the reflected Bessel heat kernel weight."""
    z = rho * r / (2.0 * t)
    return math.exp(-(r - rho) ** 2 / (4.0 * t)) * r ** (1.0 - alpha) * rho ** alpha \
        / (2.0 * t) * bessel_i_scaled(alpha - 1.0, z)


# ---------------------------------------------------------------------------
# Cauchy problem (k = 1)


def _sigma_scale(r: float, t: float) -> float:
    return min(1.0, t + r * math.sqrt(t))


def _sigma_reach(r: float, rho: float, t: float) -> float:
    """Vertical distance beyond which ``K_{alpha,1}`` is below ``e^-45`` of its peak.

    The lambda-integrand is analytic in the strip ``|Im lambda| < pi``; shifting
    the contour towards ``i pi`` bounds the transform by
    ``exp(-pi X + 2 sqrt(A pi X))`` with ``X = s/t`` and ``A = (r^2+rho^2)/4t``.
    """
    a = (r * r + rho * rho) / (4.0 * t)
    x = (math.sqrt(a) + math.sqrt(a + 45.0)) ** 2 / math.pi
    return 1.5 * t * x


def _rho_window(r_lo: float, r_hi: float, t: float, t_guard: float | None = None) -> tuple[float, float]:
    # exp(-(r - rho)^2 / 4t) < e^-40 outside; also stay inside the overflow guard
    t_guard = t if t_guard is None else t_guard
    width = math.sqrt(4.0 * t * 40.0)
    hi = r_hi + width
    room = 4.0 * t_guard * _LOG_GUARD * (1.0 - 1e-9) - r_hi * r_hi
    if room > 0:
        hi = min(hi, math.sqrt(room))
    return max(0.0, r_lo - width), hi


def cauchy_solve_k1(alpha: float, phi: Callable, r: float, sigma: float, t: float,
                    cfg: QuadConfig | None = None) -> EvalResult:
    """Solution at ``((r, sigma), t)`` of the reflected Cauchy problem with ``k = 1``.

    ``u = int_0^inf int_R K_{alpha,1}((r,sigma),(rho,sigma'),t) phi(rho,sigma') dsigma' rho^(2alpha-1) drho``
    by nested adaptive quadrature.  ``phi(rho, sigma_array)`` must accept an
    array of ``sigma'`` values.  The ``rho`` range is truncated where the
    kernel's Gaussian factor ``exp(-(r-rho)^2/4t)`` drops below ``e^-40``
    (or earlier, at the edge of the supported exponent range).
    """
    cfg = cfg or QuadConfig()
    inner_cfg = cfg.with_(rel_tol=max(cfg.rel_tol * 0.1, 1e-14))
    lo, hi = _rho_window(r, r, t)
    tau_scale = _sigma_scale(r, t)
    n_evals = 0
    ok = True

    def middle(rho: float) -> float:
        nonlocal n_evals, ok
        # |K| is largest at s = 0; resolve each tail value only relative to that peak
        peak = mehler_kernel_k(alpha, 1, r, rho, 0.0, t, inner_cfg).value
        if peak == 0.0:
            return 0.0
        kcfg = inner_cfg.with_(abs_tol=inner_cfg.rel_tol * 1e-3 * peak)

        def over_tau(tau):
            kv = mehler_kernel_k(alpha, 1, r, rho, tau, t, kcfg)
            fvals = phi(rho, sigma + tau) + phi(rho, sigma - tau)
            return np.asarray(kv.value) * fvals

        reach = _sigma_reach(r, rho, t)
        breaks = [b for b in (tau_scale, 4.0 * tau_scale) if b < reach]
        res = integrate_adaptive(over_tau, 0.0, reach, inner_cfg, breakpoints=breaks)
        n_evals += res.n_evals
        ok = ok and res.converged
        return res.value * rho ** (2.0 * alpha - 1.0)

    def outer(rhos):
        return np.array([middle(rho) for rho in rhos])

    breaks = [p for p in (r - 3 * math.sqrt(t), r, r + 3 * math.sqrt(t)) if lo < p < hi]
    res = integrate_adaptive(outer, lo, hi, cfg, breakpoints=breaks)
    return EvalResult(res.value, res.err_estimate, res.n_evals + n_evals, res.converged and ok)


def chapman_kolmogorov_k1(alpha: float, r: float, r2: float, s: float, t1: float, t2: float,
                          cfg: QuadConfig | None = None) -> tuple[float, float]:
    """Both sides of the semigroup identity for ``K_{alpha,1}``.

    Returns ``(composed, direct)`` where ``composed`` integrates
    ``K((r,0),(rho,tau),t1) K((rho,tau),(r2,s),t2)`` over ``tau in R`` and
    ``rho^(2 alpha - 1) d rho`` and ``direct = K((r,0),(r2,s),t1+t2)``.
    """
    cfg = cfg or QuadConfig()
    inner_cfg = cfg.with_(rel_tol=max(cfg.rel_tol * 0.1, 1e-14))
    tmax = max(t1, t2)
    lo, hi = _rho_window(min(r, r2), max(r, r2), tmax, min(t1, t2))
    centre = 0.5 * s
    tau_scale = _sigma_scale(max(r, r2), tmax)

    def middle(rho: float) -> float:
        p1 = mehler_kernel_k(alpha, 1, r, rho, 0.0, t1, inner_cfg).value
        p2 = mehler_kernel_k(alpha, 1, rho, r2, 0.0, t2, inner_cfg).value
        if p1 == 0.0 or p2 == 0.0:
            return 0.0
        c1 = inner_cfg.with_(abs_tol=inner_cfg.rel_tol * 1e-3 * p1)
        c2 = inner_cfg.with_(abs_tol=inner_cfg.rel_tol * 1e-3 * p2)

        def over_x(x):
            plus = centre + x
            minus = centre - x
            k1p = mehler_kernel_k(alpha, 1, r, rho, np.abs(plus), t1, c1).value
            k1m = mehler_kernel_k(alpha, 1, r, rho, np.abs(minus), t1, c1).value
            k2p = mehler_kernel_k(alpha, 1, rho, r2, np.abs(s - plus), t2, c2).value
            k2m = mehler_kernel_k(alpha, 1, rho, r2, np.abs(s - minus), t2, c2).value
            return k1p * k2p + k1m * k2m

        reach = max(_sigma_reach(r, rho, t1), _sigma_reach(rho, r2, t2)) + s
        breaks = [b for b in (centre, tau_scale, 4.0 * tau_scale) if 0 < b < reach]
        res = integrate_adaptive(over_x, 0.0, reach, inner_cfg, breakpoints=breaks)
        return res.value * rho ** (2.0 * alpha - 1.0)

    def outer(rhos):
        return np.array([middle(rho) for rho in rhos])

    breaks = [p for p in (r, r2) if lo < p < hi]
    composed = integrate_adaptive(outer, lo, hi, cfg, breakpoints=breaks).value
    direct = mehler_kernel_k(alpha, 1, r, r2, s, t1 + t2, inner_cfg).value
    return float(composed), float(direct)


# ---------------------------------------------------------------------------
# p-flow prototypes


def gp_euclid(params: PFlowParams, r, t):
    """``t^(-(n+p-2)/(2(p-1))) exp(-r^2 / (4 (p-1) t))``."""
    if params.heisenberg:
        raise DomainError("gp_euclid needs Euclidean parameters")
    r = np.asarray(r, dtype=float)
    t = np.asarray(t, dtype=float)
    if np.any(t <= 0):
        raise DomainError("time must be positive")
    p = params.p
    out = t ** (-0.5 * params.kappa) * np.exp(-r * r / (4.0 * (p - 1.0) * t))
    return float(out) if out.ndim == 0 else out


def gp_euclid_energy(params: PFlowParams, r: float) -> float:
    """Closed-form ``int_0^inf g_p(r, t) dt = c_{n,p} r^(-(n-p)/(p-1))``.

    The substitution ``u = r^2 / (4(p-1)t)`` gives
    ``c_{n,p} = (4(p-1))^(kappa/2 - 1) Gamma(kappa/2 - 1)``; needs ``kappa > 2``.
    """
    kappa = params.kappa
    if not kappa > 2:
        raise DomainError(f"time integral diverges for kappa = {kappa:g} <= 2")
    if not r > 0:
        raise DomainError("r must be positive")
    c = (4.0 * (params.p - 1.0)) ** (0.5 * kappa - 1.0) * gamma(0.5 * kappa - 1.0)
    return c * r ** (2.0 - kappa)


def gp_heisenberg(params: PFlowParams, pt: RadialPoint, cfg: QuadConfig | None = None,
                  method: str = "reduction") -> EvalResult:
    """Heisenberg candidate ``G_p((z, sigma), t)`` on ``H^n``.

    ``method="reduction"`` uses ``G_p(r, s, t) = ((4 pi (p-1))^beta / 2) G*_{alpha,beta}(r, s, (p-1) t)``
    with ``alpha = (Q-p)/(2(p-1))``, ``beta = alpha + 1``, ``k = 1``.
    ``method="direct"`` integrates the defining integral over ``[-L, L]`` with the
    adaptive rule; ``L`` comes from ``(x/sinh x)^alpha <= (2x)^alpha e^(-alpha x)``
    and ``x coth x >= x``, so the discarded tails are below ``e^-40`` of the peak.
    """
    if not params.heisenberg:
        raise DomainError("gp_heisenberg needs Heisenberg parameters")
    cfg = cfg or QuadConfig()
    p, alpha, beta = params.p, params.alpha, params.beta
    if method == "reduction":
        inner = mehler_g(KernelParams(alpha, beta, 1), RadialPoint(pt.r, pt.s, (p - 1.0) * pt.t), cfg)
        return _scaled(inner, (4.0 * math.pi * (p - 1.0)) ** beta / 2.0)
    if method != "direct":
        raise ValueError(f"unknown method {method!r}")
    a = pt.r * pt.r / (4.0 * (p - 1.0) * pt.t)
    freq = pt.s / ((p - 1.0) * pt.t)

    def f(lam):
        x = np.abs(lam)
        return np.cos(freq * lam) * np.exp(alpha * _log_x_over_sinh(x) - a * _x_coth(x))

    rate = alpha + a
    reach = 1.0
    for _ in range(60):
        reach = max(1.0, (40.0 + alpha * math.log(2.0 * reach)) / rate)
    edges = np.linspace(-reach, reach, 9)
    inner = _unscaled_cfg(cfg, pt.t ** (-beta))
    # cancellation leaves roundoff of order eps * peak * length; do not chase it
    floor = 50.0 * np.finfo(float).eps * math.exp(-a) * 2.0 * reach
    inner = inner.with_(abs_tol=max(inner.abs_tol, floor))
    res = integrate_adaptive(f, edges[0], edges[-1], inner, breakpoints=edges[1:-1])
    return _scaled(res, pt.t ** (-beta))


def heisenberg_energy_constant(params: PFlowParams, variant: str = "thm") -> float:
    """``C_{n,p}`` with ``int_0^inf G_p dt = C_{n,p} N^(-(Q-p)/(p-1))``.

    From the reduction above, ``C_{n,p} = (4 pi)^beta (p-1)^(beta-1) / 2`` times the
    conformal constant for ``(alpha, k = 1)``.
    """
    alpha, beta, p = params.alpha, params.beta, params.p
    return (4.0 * math.pi) ** beta * (p - 1.0) ** (beta - 1.0) / 2.0 * conformal_constant(alpha, 1, variant)


def gp_heisenberg_energy(params: PFlowParams, r: float, s: float, cfg: QuadConfig | None = None) -> EvalResult:
    """Numerical ``int_0^inf G_p((r, s), t) dt``."""
    p = params.p
    inner = energy_numeric(params.alpha, 1, r, s, cfg)
    return _scaled(inner, (4.0 * math.pi * (p - 1.0)) ** params.beta / 2.0 / (p - 1.0))


# ---------------------------------------------------------------------------
# conformal energies


def conformal_constant(alpha: float, k: int, variant: str = "thm") -> float:
    """Candidate constant in front of ``N^(-(2 alpha + 2k - 2))``.

    ``variant="thm"``: ``2^(alpha+2k-4) Gamma(alpha/2) Gamma((alpha+k-1)/2) / pi^((2alpha+k+1)/2)``.
    ``variant="meh"``: the group constant ``C(m, k)`` with ``m = 2 alpha``,
    ``2^(m/2+2k-2) Gamma(m/4) Gamma((m/2+k-1)/2) pi^(-(m+k+1)/2)``.
    """
    if not alpha > 0 or k < 1:
        raise DomainError("need alpha > 0 and k >= 1")
    if variant == "thm":
        return 2.0 ** (alpha + 2 * k - 4) * gamma(alpha / 2) * gamma((alpha + k - 1) / 2) \
            / math.pi ** ((2 * alpha + k + 1) / 2)
    if variant == "meh":
        m = 2.0 * alpha
        return 2.0 ** (m / 2 + 2 * k - 2) * gamma(m / 4) * gamma((m / 2 + k - 1) / 2) \
            * math.pi ** (-(m + k + 1) / 2)
    raise ValueError(f"unknown variant {variant!r}")


def energy_closed(alpha: float, k: int, r: float, s: float, variant: str = "thm") -> float:
    """Candidate closed form of ``int_0^inf G_{alpha,alpha+k} dt`` (see :func:`conformal_constant`)."""
    if r == 0 and s == 0:
        raise DomainError("energy is singular at the origin")
    return conformal_constant(alpha, k, variant) * gauge(r, s) ** (-(2 * alpha + 2 * k - 2))


def _solve_tail(rhs: float, power: float) -> float:
    # smallest X >= 1 with X - power*log(X) >= rhs
    x = max(rhs, 1.0)
    for _ in range(60):
        x_new = rhs + power * math.log(x) if power > 0 else rhs
        x_new = max(x_new, 1.0)
        if abs(x_new - x) < 1e-12:
            break
        x = x_new
    return x + 1.0


def _small_time_cutoff(alpha: float, k: int, r: float, s: float) -> float:
    beta = alpha + k
    n2 = gauge(r, s) ** 2
    if r > 0:
        # |G| <= C t^-beta exp(-r^2/4t); the neglected piece relative to the energy
        # is about (N^2/r^2)^(beta-1) X^(beta-2) e^-X with X = r^2 / (4 t_min)
        x = _solve_tail(40.0 + (beta - 1.0) * math.log(n2 / (r * r)), beta - 2.0)
        return r * r / (4.0 * x)
    # r = 0: the lambda integrand is analytic in |Im lambda| < pi, so G decays like
    # exp(-pi s / t); X = pi s / t_min
    x = _solve_tail(40.0, beta + alpha)
    return math.pi * s / x


def energy_numeric(alpha: float, k: int, r: float, s: float, cfg: QuadConfig | None = None) -> EvalResult:
    """``int_0^inf G_{alpha,alpha+k}((r, s), t) dt`` by quadrature.

    The time axis is split at ``t* = N(r, s)^2 / 4`` (or ``cfg.time_split``).
    Below a cutoff where the kernel is provably negligible the small-time side
    is truncated; on-axis points (``r = 0``) converge slowly because the
    ``lambda`` integrand oscillates strongly at small times.
    """
    if r == 0 and s == 0:
        raise DomainError("energy is singular at the origin")
    cfg = cfg or QuadConfig()
    params = KernelParams(alpha, alpha + k, k)
    t_star = cfg.time_split or gauge(r, s) ** 2 / 4.0
    inner_cfg = cfg.with_(rel_tol=max(cfg.rel_tol * 0.01, 1e-13))

    def g(t):
        return mehler_g(params, RadialPoint(r, s, t), inner_cfg).value

    return integrate_time_profile(g, t_star, cfg, t_min=_small_time_cutoff(alpha, k, r, s))
