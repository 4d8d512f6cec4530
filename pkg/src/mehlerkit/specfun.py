"""Special functions used by the kernels and the identity suites.

Everything here works on real arguments only.  Bessel and hypergeometric
routines accept numpy arrays for the argument (the order/parameters are
scalars) and return an array of the same shape, or a float for scalar input.

Regimes
-------
``bessel_i_scaled``
    positive power series for ``x <= max(30, 2 nu^2)``, Hankel-type
    large-argument expansion beyond.  Both branches are computed directly in
    scaled form so nothing overflows for large ``x``.
``bessel_j``
    power series for ``x <= 6``, Miller backward recurrence normalised by the
    Neumann series of ``(x/2)^nu`` in the middle range, Hankel expansion for
    ``x >= max(25, 2 nu^2)``.
``hyp2f1``
    Gauss series on ``|u| <= 0.99``; negative ``u`` goes through the Pfaff-Kummer
    map ``u -> u/(u-1)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, OverflowGuardError, PoleError

__all__ = [
    "SpecFunResult",
    "gamma",
    "log_gamma",
    "bessel_i_scaled",
    "bessel_i",
    "log_bessel_i_reduced",
    "bessel_j",
    "bessel_j_reduced",
    "hyp2f1",
    "sphere_exp_integral",
    "sphere_area",
    "I_SERIES_SWITCH",
    "J_SERIES_SWITCH",
    "J_ASYMPTOTIC_SWITCH",
    "HYP2F1_U_MAX",
]

I_SERIES_SWITCH = 30.0
J_SERIES_SWITCH = 6.0
J_ASYMPTOTIC_SWITCH = 25.0
HYP2F1_U_MAX = 0.99
_HYP2F1_U_MIN = -99.0
_GAMMA_GUARD = 170.0
_EPS = np.finfo(float).eps
_TINY = np.finfo(float).tiny
_LOG2 = math.log(2.0)


@dataclass(frozen=True)
class SpecFunResult:
    value: float
    abs_error_estimate: float
    underflow_flag: bool


def _is_nonpositive_integer(x: float) -> bool:
    return x <= 0 and float(x).is_integer()


def gamma(x: float) -> float:
    """Gamma function for real ``x`` with ``|x| <= 170``.

    Raises :class:`PoleError` at ``0, -1, -2, ...`` and
    :class:`OverflowGuardError` beyond the guard.
    """
    x = float(x)
    if _is_nonpositive_integer(x):
        raise PoleError(f"gamma has a pole at x={x:g}")
    if abs(x) > _GAMMA_GUARD:
        raise OverflowGuardError(f"|x|={abs(x):g} exceeds the gamma overflow guard {_GAMMA_GUARD:g}")
    return math.gamma(x)


def log_gamma(x: float) -> float:
    """``log|Gamma(x)|``, usable far beyond the gamma overflow guard."""
    x = float(x)
    if _is_nonpositive_integer(x):
        raise PoleError(f"log_gamma has a pole at x={x:g}")
    return math.lgamma(x)


def _as_array(x):
    arr = np.asarray(x, dtype=float)
    return arr, arr.ndim == 0


def _finish(out, scalar):
    return float(out) if scalar else out


# ---------------------------------------------------------------------------
# modified Bessel I


def _i_reduced_series(nu: float, x: np.ndarray) -> np.ndarray:
    # sum_j (x^2/4)^j / (j! (nu+1)_j); all terms positive
    q = 0.25 * x * x
    term = np.ones_like(x)
    total = np.ones_like(x)
    for j in range(1, 2000):
        term = term * q / (j * (nu + j))
        total = total + term
        if np.all(term <= 1e-17 * total):
            break
    return total


def _i_scaled_asymptotic(nu: float, x: np.ndarray) -> np.ndarray:
    mu = 4.0 * nu * nu
    term = np.ones_like(x)
    total = np.ones_like(x)
    active = np.ones(x.shape, dtype=bool)
    for k in range(1, 200):
        new = term * (-(mu - (2 * k - 1) ** 2)) / (8.0 * k * x)
        grow = np.abs(new) > np.abs(term)
        active &= ~grow
        term = np.where(active, new, term)
        total = total + np.where(active, new, 0.0)
        active &= np.abs(new) > 1e-17 * np.abs(total)
        if not active.any():
            break
    return total / np.sqrt(2.0 * np.pi * x)


def _i_switch(nu: float) -> float:
    return max(I_SERIES_SWITCH, 2.0 * nu * nu)


def _check_i_order(nu: float) -> None:
    if not nu > -1:
        raise DomainError(f"Bessel I order must exceed -1, got {nu}")


def log_bessel_i_reduced(nu: float, x):
    """``log((x/2)^(-nu) I_nu(x))``, finite down to and including ``x = 0``.

    At ``x = 0`` the value is ``-log Gamma(nu + 1)``.  This is the stable
    building block whenever ``I_nu`` multiplies a compensating power of its
    argument (kernel limits at the pole, sphere integrals).
    """
    nu = float(nu)
    _check_i_order(nu)
    x, scalar = _as_array(x)
    if np.any(x < 0):
        raise DomainError("Bessel I argument must be nonnegative")
    out = np.empty_like(x)
    sw = _i_switch(nu)
    small = x <= sw
    if small.any():
        out[small] = np.log(_i_reduced_series(nu, x[small])) - math.lgamma(nu + 1.0)
    if (~small).any():
        xb = x[~small]
        out[~small] = np.log(_i_scaled_asymptotic(nu, xb)) + xb - nu * np.log(0.5 * xb)
    return _finish(out, scalar)


def bessel_i_scaled(nu: float, x):
    """Exponentially scaled modified Bessel function ``exp(-x) I_nu(x)``.

    Parameters
    ----------
    nu : float
        Order, ``nu > -1``.
    x : float or array_like
        Nonnegative argument.

    Notes
    -----
    At ``x = 0`` the result is 1 for ``nu = 0``, 0 for ``nu > 0`` and ``inf``
    for ``-1 < nu < 0``.
    """
    nu = float(nu)
    _check_i_order(nu)
    x, scalar = _as_array(x)
    if np.any(x < 0):
        raise DomainError("Bessel I argument must be nonnegative")
    out = np.empty_like(x)
    sw = _i_switch(nu)
    small = x <= sw
    if small.any():
        xs = x[small]
        with np.errstate(divide="ignore"):
            # log(x) - log 2 avoids underflow of x/2 for subnormal x; 0 * log 0 is 0 here
            logpre = (nu * (np.log(xs) - _LOG2) if nu != 0 else 0.0) - math.lgamma(nu + 1.0) - xs
        out[small] = np.exp(logpre) * _i_reduced_series(nu, xs)
    if (~small).any():
        out[~small] = _i_scaled_asymptotic(nu, x[~small])
    return _finish(out, scalar)


def bessel_i(nu: float, x: float) -> SpecFunResult:
    """Unscaled ``I_nu(x)`` with an underflow flag and an error estimate."""
    logval = log_bessel_i_reduced(nu, x) + (nu * (math.log(x) - _LOG2) if x > 0 else 0.0)
    if x == 0:
        value = bessel_i_scaled(nu, 0.0)
        return SpecFunResult(value, 0.0, nu > 0)
    underflow = logval < math.log(_TINY)
    value = math.exp(logval) if logval < 709.0 else math.inf
    return SpecFunResult(value, 1e-13 * abs(value), underflow)


# ---------------------------------------------------------------------------
# Bessel J


def _j_reduced_series(nu: float, x: np.ndarray) -> np.ndarray:
    # sum_j (-x^2/4)^j / (j! (nu+1)_j)
    q = -0.25 * x * x
    term = np.ones_like(x)
    total = np.ones_like(x)
    for j in range(1, 500):
        term = term * q / (j * (nu + j))
        total = total + term
        if np.all(np.abs(term) <= 1e-17 * np.maximum(np.abs(total), 1e-300)):
            break
    return total


def _j_hankel(nu: float, x: np.ndarray) -> np.ndarray:
    mu = 4.0 * nu * nu
    p = np.ones_like(x)
    q = np.zeros_like(x)
    c = np.ones_like(x)
    active = np.ones(x.shape, dtype=bool)
    for k in range(1, 200):
        new = c * (mu - (2 * k - 1) ** 2) / (8.0 * k * x)
        active &= ~(np.abs(new) > np.abs(c))
        sign = -1.0 if (k // 2) % 2 else 1.0
        contrib = np.where(active, sign * new, 0.0)
        if k % 2:
            q = q + contrib
        else:
            p = p + contrib
        c = np.where(active, new, c)
        active &= np.abs(new) > 1e-17
        if not active.any():
            break
    chi = x - (0.5 * nu + 0.25) * np.pi
    return np.sqrt(2.0 / (np.pi * x)) * (p * np.cos(chi) - q * np.sin(chi))


def _j_miller(nu: float, x: np.ndarray) -> np.ndarray:
    n = math.floor(nu)
    nu0 = nu - n
    top = int(np.max(x)) + 40 + max(n, 0)
    top += top % 2
    # Neumann-series weights (nu0 + 2k) Gamma(nu0 + k) / k!, with k = 0 -> Gamma(nu0 + 1)
    kmax = top // 2
    weights = np.empty(kmax + 1)
    weights[0] = math.gamma(nu0 + 1.0)
    g = math.gamma(nu0 + 1.0)
    for k in range(1, kmax + 1):
        if k > 1:
            g *= (nu0 + k - 1) / k
        weights[k] = (nu0 + 2 * k) * g
    y_up = np.zeros_like(x)
    y = np.full_like(x, 1e-30)
    norm = weights[kmax] * y
    target = y.copy() if top == n else np.zeros_like(x)
    for mu in range(top, 0, -1):
        y_down = 2.0 * (nu0 + mu) / x * y - y_up
        y_up, y = y, y_down
        idx = mu - 1
        if idx % 2 == 0:
            norm = norm + weights[idx // 2] * y
        if idx == n:
            target = y.copy()
        big = np.abs(y) > 1e200
        if big.any():
            scale = np.where(big, 1e-200, 1.0)
            y, y_up, norm, target = y * scale, y_up * scale, norm * scale, target * scale
    if n == -1:
        target = 2.0 * nu0 / x * y - y_up
    return target * np.power(0.5 * x, nu0) / norm


def _j_asym_switch(nu: float) -> float:
    return max(J_ASYMPTOTIC_SWITCH, 2.0 * nu * nu)


def _check_j_order(nu: float) -> None:
    if nu < -0.5:
        raise DomainError(f"Bessel J order must be >= -1/2, got {nu}")


def bessel_j(nu: float, x):
    """Bessel function of the first kind ``J_nu(x)`` for ``nu >= -1/2``, ``x >= 0``."""
    nu = float(nu)
    _check_j_order(nu)
    x, scalar = _as_array(x)
    if np.any(x < 0):
        raise DomainError("Bessel J argument must be nonnegative")
    out = np.empty_like(x)
    small = x <= J_SERIES_SWITCH
    large = x >= _j_asym_switch(nu)
    mid = ~(small | large)
    if small.any():
        xs = x[small]
        with np.errstate(divide="ignore"):
            pre = (np.exp(nu * (np.log(xs) - _LOG2)) if nu != 0 else 1.0) / math.gamma(nu + 1.0)
        out[small] = pre * _j_reduced_series(nu, xs)
    if mid.any():
        out[mid] = _j_miller(nu, x[mid])
    if large.any():
        out[large] = _j_hankel(nu, x[large])
    return _finish(out, scalar)


def bessel_j_reduced(nu: float, x):
    """Normalised Bessel function ``Gamma(nu+1) (2/x)^nu J_nu(x)``, equal to 1 at 0.

    Orders -1/2 and 1/2 use their elementary forms ``cos x`` and ``sin x / x``.
    """
    nu = float(nu)
    _check_j_order(nu)
    x, scalar = _as_array(x)
    if nu == -0.5:
        return _finish(np.cos(x), scalar)
    if nu == 0.5:
        with np.errstate(invalid="ignore", divide="ignore"):
            out = np.where(x == 0, 1.0, np.sin(x) / np.where(x == 0, 1.0, x))
        return _finish(out, scalar)
    out = np.empty_like(x)
    small = x <= J_SERIES_SWITCH
    if small.any():
        out[small] = _j_reduced_series(nu, x[small])
    if (~small).any():
        xb = x[~small]
        out[~small] = math.gamma(nu + 1.0) * np.power(2.0 / xb, nu) * bessel_j(nu, xb)
    return _finish(out, scalar)


# ---------------------------------------------------------------------------
# Gauss hypergeometric 2F1


def _f_series(a: float, b: float, c: float, u: np.ndarray) -> np.ndarray:
    term = np.ones_like(u)
    total = np.ones_like(u)
    quiet = 0
    for n in range(60000):
        term = term * ((a + n) * (b + n) / ((c + n) * (n + 1.0))) * u
        total = total + term
        if np.all(np.abs(term) <= 1e-17 * np.abs(total)):
            quiet += 1
            if quiet >= 2:
                return total
        else:
            quiet = 0
    raise DomainError("hypergeometric series failed to converge")


def hyp2f1(a: float, b: float, c: float, u, method: str = "auto"):
    """Gauss hypergeometric function ``F(a, b; c; u)`` for real ``u <= 0.99``.

    ``method`` selects the evaluation route:

    ``"auto"``
        direct series for ``u >= 0``, Kummer's map for ``u < 0``.
    ``"series"``
        direct Gauss series, ``|u| <= 0.99``.
    ``"pfaff_a"``
        ``(1-u)^(-a) F(a, c-b; c; u/(u-1))`` (the Kummer relation).
    ``"pfaff_b"``
        ``(1-u)^(-b) F(c-a, b; c; u/(u-1))``.
    ``"euler"``
        ``(1-u)^(c-a-b) F(c-a, c-b; c; u)``.

    Alternative routes exist so the transformation identities can be checked
    with genuinely different series.
    """
    a, b, c = float(a), float(b), float(c)
    if _is_nonpositive_integer(c):
        raise PoleError(f"c={c:g} is a nonpositive integer")
    u, scalar = _as_array(u)
    if np.any(u > HYP2F1_U_MAX):
        raise DomainError(f"hyp2f1 argument must be <= {HYP2F1_U_MAX}")
    if np.any(u < _HYP2F1_U_MIN):
        raise DomainError(f"hyp2f1 argument must be >= {_HYP2F1_U_MIN}")

    def series(aa, bb, arg):
        if np.any(np.abs(arg) > HYP2F1_U_MAX):
            raise DomainError(f"series argument outside |u| <= {HYP2F1_U_MAX}")
        return _f_series(aa, bb, c, arg)

    if method == "auto":
        out = np.empty_like(u)
        pos = u >= 0
        if pos.any():
            out[pos] = series(a, b, u[pos])
        if (~pos).any():
            out[~pos] = hyp2f1(a, b, c, u[~pos], method="pfaff_a")
        return _finish(out, scalar)
    if method == "series":
        return _finish(series(a, b, u), scalar)
    if method == "euler":
        return _finish((1.0 - u) ** (c - a - b) * series(c - a, c - b, u), scalar)
    w = u / (u - 1.0)
    if method == "pfaff_a":
        return _finish((1.0 - u) ** (-a) * series(a, c - b, w), scalar)
    if method == "pfaff_b":
        return _finish((1.0 - u) ** (-b) * series(c - a, b, w), scalar)
    raise ValueError(f"unknown hyp2f1 method {method!r}")


# ---------------------------------------------------------------------------


def sphere_area(m: int) -> float:
    """Surface measure of the unit sphere ``S^(m-1)``: ``2 pi^(m/2) / Gamma(m/2)``."""
    return 2.0 * math.pi ** (0.5 * m) / math.gamma(0.5 * m)


def sphere_exp_integral(m: int, z):
    """``int_{S^(m-1)} exp(z <xi, y>) dsigma(y) = (2 pi)^(m/2) z^(1-m/2) I_(m/2-1)(z)``.

    Evaluated as ``2 pi^(m/2) (z/2)^(1-m/2) I_(m/2-1)(z)`` through the reduced
    Bessel logarithm, so ``z -> 0`` returns the sphere area exactly.
    """
    if int(m) != m or m < 2:
        raise DomainError("sphere dimension m must be an integer >= 2")
    z, scalar = _as_array(z)
    if np.any(z < 0):
        raise DomainError("sphere_exp_integral needs z >= 0")
    nu = 0.5 * m - 1.0
    out = 2.0 * math.pi ** (0.5 * m) * np.exp(log_bessel_i_reduced(nu, z))
    return _finish(out, scalar)
