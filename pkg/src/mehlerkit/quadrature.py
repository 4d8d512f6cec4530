"""Adaptive one-dimensional quadrature and the radial Fourier (Bochner) reduction.

The engine is a globally adaptive Gauss-Kronrod 7/15 scheme.  All panels
selected for bisection in a round are evaluated with a single vectorised call
of the integrand, so integrands must accept a 1-d numpy array of abscissae.
An integrand may also return a 2-d array of shape ``(len(x), m)``; the
components are then integrated simultaneously on a shared panel set and the
result value is an array of length ``m``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np

from .errors import DomainError, QuadratureError
from .specfun import bessel_j_reduced, sphere_area

__all__ = [
    "QuadConfig",
    "EvalResult",
    "integrate_adaptive",
    "integrate_semiinfinite",
    "bochner_radial_ft",
    "integrate_time_profile",
]

_EPS = np.finfo(float).eps

# Gauss-Kronrod 7/15 abscissae (nonnegative half) and weights
_XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])
_NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])
_KW = np.concatenate([_WGK[:-1], _WGK[::-1]])
_GW = np.zeros(15)
_GW[[1, 3, 5, 7, 9, 11, 13]] = np.concatenate([_WG[:-1], _WG[::-1]])


@dataclass(frozen=True)
class QuadConfig:
    """Tolerances and limits shared by every integration routine.

    ``time_split`` overrides the default split point of time-profile
    integrals (``None`` means the caller's default, e.g. ``N^2/4``).
    """

    rel_tol: float = 1e-10
    abs_tol: float = 0.0
    max_subdivisions: int = 4000
    truncation_tail_bound: float = 1e-16
    time_split: float | None = None

    def __post_init__(self):
        if not (self.rel_tol > 0 and self.rel_tol >= 1e-14):
            raise DomainError(f"rel_tol must be >= 1e-14, got {self.rel_tol}")
        if self.abs_tol < 0:
            raise DomainError("abs_tol must be nonnegative")
        if not 0 < self.max_subdivisions <= 10**6:
            raise DomainError("max_subdivisions must lie in (0, 1e6]")
        if not self.truncation_tail_bound > 0:
            raise DomainError("truncation_tail_bound must be positive")
        if self.time_split is not None and not self.time_split > 0:
            raise DomainError("time_split must be positive")

    def with_(self, **changes) -> "QuadConfig":
        return replace(self, **changes)


@dataclass(frozen=True)
class EvalResult:
    value: float | np.ndarray
    err_estimate: float
    n_evals: int
    converged: bool
    cutoff: float | None = field(default=None, compare=False)

    def __float__(self):
        return float(self.value)


class _Adaptive:
    """Panel bookkeeping for global adaptive Gauss-Kronrod integration."""

    def __init__(self, f, rel_tol, abs_tol, limit):
        self.f = f
        self.rel_tol = rel_tol
        self.abs_tol = abs_tol
        self.limit = limit
        self.a = np.empty(0)
        self.b = np.empty(0)
        self.est = None
        self.err = None
        self.absint = None
        self.n_evals = 0
        self.vector = False

    def _eval(self, a, b):
        c = 0.5 * (a + b)
        h = 0.5 * (b - a)
        x = c[:, None] + h[:, None] * _NODES[None, :]
        fx = np.asarray(self.f(x.ravel()), dtype=float)
        self.n_evals += x.size
        if fx.ndim == 1:
            fx = fx.reshape(len(a), 15, 1)
        else:
            self.vector = True
            fx = fx.reshape(len(a), 15, fx.shape[-1])
        if not np.all(np.isfinite(fx)):
            raise QuadratureError("integrand returned a non-finite value")
        hh = h[:, None]
        resk = np.einsum("k,nkm->nm", _KW, fx)
        resg = np.einsum("k,nkm->nm", _GW, fx)
        resabs = np.einsum("k,nkm->nm", _KW, np.abs(fx))
        mean = 0.5 * resk
        resasc = np.einsum("k,nkm->nm", _KW, np.abs(fx - mean[:, None, :]))
        est = resk * hh
        resabs = resabs * np.abs(hh)
        resasc = resasc * np.abs(hh)
        err = np.abs((resk - resg) * hh)
        with np.errstate(divide="ignore", invalid="ignore"):
            scaled = resasc * np.minimum(1.0, (200.0 * err / resasc) ** 1.5)
        err = np.where((resasc > 0) & (err > 0), scaled, err)
        err = np.maximum(err, 50.0 * _EPS * resabs)
        return est, err, resabs

    def add(self, a, b):
        a = np.atleast_1d(np.asarray(a, dtype=float))
        b = np.atleast_1d(np.asarray(b, dtype=float))
        est, err, absint = self._eval(a, b)
        if self.est is None:
            self.a, self.b, self.est, self.err, self.absint = a, b, est, err, absint
        else:
            self.a = np.concatenate([self.a, a])
            self.b = np.concatenate([self.b, b])
            self.est = np.concatenate([self.est, est])
            self.err = np.concatenate([self.err, err])
            self.absint = np.concatenate([self.absint, absint])

    @property
    def total(self):
        return self.est.sum(axis=0)

    def tolerance(self):
        return np.maximum(self.abs_tol, self.rel_tol * np.abs(self.total))

    def converged(self):
        return bool(np.all(self.err.sum(axis=0) <= self.tolerance()))

    def refine(self) -> bool:
        while True:
            tol = self.tolerance()
            if np.all(self.err.sum(axis=0) <= tol):
                return True
            n = len(self.a)
            room = self.limit - n
            if room <= 0:
                return False
            floor = 50.0 * _EPS * self.absint
            width_ok = np.abs(self.b - self.a) > 64 * _EPS * np.maximum(np.abs(self.a), np.abs(self.b))
            improvable = np.any(self.err > 1.5 * floor, axis=1) & width_ok
            if not improvable.any():
                return False
            safe_tol = np.where(tol > 0, tol, np.finfo(float).tiny)
            score = np.max(self.err / safe_tol, axis=1)
            order = np.argsort(-np.where(improvable, score, -1.0))
            order = order[improvable[order]]
            remaining = score.sum() - np.cumsum(score[order])
            take = int(np.searchsorted(-remaining, -0.5)) + 1
            take = max(1, min(take, len(order), room))
            pick = order[:take]
            keep = np.ones(n, dtype=bool)
            keep[pick] = False
            mid = 0.5 * (self.a[pick] + self.b[pick])
            new_a = np.concatenate([self.a[pick], mid])
            new_b = np.concatenate([mid, self.b[pick]])
            est, err, absint = self._eval(new_a, new_b)
            self.a = np.concatenate([self.a[keep], new_a])
            self.b = np.concatenate([self.b[keep], new_b])
            self.est = np.concatenate([self.est[keep], est])
            self.err = np.concatenate([self.err[keep], err])
            self.absint = np.concatenate([self.absint[keep], absint])

    def result(self, ok: bool, cutoff=None) -> EvalResult:
        total = self.total
        err = self.err.sum(axis=0)
        if self.vector:
            value = total
            err_scalar = float(np.max(err))
        else:
            value = float(total[0])
            err_scalar = float(err[0])
        return EvalResult(value, err_scalar, self.n_evals, ok, cutoff)


def integrate_adaptive(f: Callable, a: float, b: float, cfg: QuadConfig | None = None,
                       breakpoints=None) -> EvalResult:
    """Integrate ``f`` over the finite interval ``[a, b]``.

    Endpoints are never sampled, so integrable endpoint singularities are
    allowed.  ``breakpoints`` (inside ``(a, b)``) seed the initial panels.
    On non-convergence the best estimate is returned with ``converged=False``.
    """
    cfg = cfg or QuadConfig()
    if not (math.isfinite(a) and math.isfinite(b) and a < b):
        raise DomainError(f"need finite a < b, got [{a}, {b}]")
    edges = [a]
    if breakpoints is not None:
        edges += sorted(float(p) for p in breakpoints if a < p < b)
    edges.append(b)
    st = _Adaptive(f, cfg.rel_tol, cfg.abs_tol, cfg.max_subdivisions)
    st.add(edges[:-1], edges[1:])
    ok = st.refine()
    return st.result(ok)


def integrate_semiinfinite(f: Callable, a: float, decay: str = "exponential",
                           cfg: QuadConfig | None = None, power: float | None = None,
                           scale: float = 1.0) -> EvalResult:
    """Integrate ``f`` over ``[a, inf)``.

    ``decay="exponential"``: panels of doubling length are appended until the
    newest panel's absolute mass is below ``truncation_tail_bound`` times the
    running value (or below ``abs_tol``, or at rounding level); the cutoff is
    recorded on the result.  ``decay="algebraic"`` (``power > 1``): the map
    ``x = a + scale*u/(1-u)`` sends the half-line onto ``[0, 1)``.
    """
    cfg = cfg or QuadConfig()
    if not (math.isfinite(a) and a >= 0):
        raise DomainError("semi-infinite integration needs finite a >= 0")
    if decay == "algebraic":
        if power is None or not power > 1:
            raise DomainError("algebraic decay needs power > 1")

        def mapped(u):
            one_minus = 1.0 - u
            x = a + scale * u / one_minus
            fx = np.asarray(f(x), dtype=float)
            jac = scale / one_minus ** 2
            return fx * (jac if fx.ndim == 1 else jac[:, None])

        res = integrate_adaptive(mapped, 0.0, 1.0, cfg)
        return replace(res, cutoff=math.inf)
    if decay != "exponential":
        raise DomainError(f"unknown decay class {decay!r}")

    st = _Adaptive(f, cfg.rel_tol, cfg.abs_tol, cfg.max_subdivisions)
    width = float(scale)
    lo = a
    st.add([lo], [lo + width])
    ok = st.refine()
    hi = lo + width
    limit = 2.0 ** 20 * max(1.0, a) + a
    while True:
        in_panel = st.a >= lo
        panel_mass = st.absint[in_panel].sum(axis=0)
        total = np.abs(st.total)
        cumulative = st.absint.sum(axis=0)
        # the last test stops cancellation-dominated integrals at rounding level
        small = (panel_mass <= cfg.truncation_tail_bound * total) | (panel_mass <= cfg.abs_tol) \
            | (panel_mass <= 1e-2 * _EPS * cumulative)
        if np.all(small):
            break
        if hi - a > limit:
            raise QuadratureError(f"tail did not decay before cutoff {hi:g}")
        lo, hi = hi, a + 2.0 * (hi - a)
        st.add([lo], [hi])
        ok = st.refine()
    return st.result(ok, cutoff=hi)


def bochner_radial_ft(f_rad: Callable, k: int, xi, cfg: QuadConfig | None = None,
                      scale: float = 1.0) -> EvalResult:
    """Fourier transform of a radial function on ``R^k`` evaluated at ``|xi|``.

    Computes ``(2 pi / xi^(k/2-1)) int_0^inf r^(k/2) f(r) J_(k/2-1)(2 pi xi r) dr``
    written as ``|S^(k-1)| int_0^inf r^(k-1) f(r) Lambda(2 pi xi r) dr`` with the
    normalised Bessel function ``Lambda = Gamma(nu+1)(2/z)^nu J_nu``; the second
    form is continuous at ``xi = 0``.  For ``k = 1`` this is the cosine
    transform ``2 int_0^inf f(r) cos(2 pi xi r) dr``.

    ``f_rad`` must decay exponentially.  ``xi`` may be an array, in which case
    all frequencies share one adaptive panel set and ``value`` is an array.
    """
    if int(k) != k or k < 1:
        raise DomainError("dimension k must be a positive integer")
    xi_arr = np.asarray(xi, dtype=float)
    if np.any(xi_arr < 0):
        raise DomainError("frequency must be nonnegative")
    nu = 0.5 * k - 1.0
    omega = sphere_area(k) if k > 1 else 2.0
    many = xi_arr.ndim > 0
    freq = 2.0 * np.pi * np.atleast_1d(xi_arr)

    def integrand(r):
        fr = np.asarray(f_rad(r), dtype=float)
        if k > 1:
            fr = fr * r ** (k - 1)
        lam = bessel_j_reduced(nu, r[:, None] * freq[None, :])
        out = omega * fr[:, None] * lam
        return out if many else out[:, 0]

    return integrate_semiinfinite(integrand, 0.0, "exponential", cfg, scale=scale)


def integrate_time_profile(g: Callable, t_star: float, cfg: QuadConfig | None = None,
                           t_min: float = 0.0) -> EvalResult:
    """Integrate a positive time profile ``g`` over ``(0, inf)``.

    The half-line is split at ``t_star``; both halves use the logarithmic
    variable ``t = t_star * exp(-/+ v)``, which turns algebraic large-time
    decay ``t^(-beta)`` into exponential decay in ``v``.  ``t_min > 0`` truncates
    the small-time side (for profiles known to vanish faster than any power
    below that time).  ``g`` is called with scalar times.
    """
    cfg = cfg or QuadConfig()
    if not t_star > 0:
        raise DomainError("t_star must be positive")

    def lower(v):
        t = t_star * np.exp(-v)
        return np.array([g(ti) * ti for ti in t])

    def upper(v):
        t = t_star * np.exp(np.minimum(v, 700.0))
        return np.array([g(ti) * ti if np.isfinite(ti) else 0.0 for ti in t])

    if t_min > 0:
        if t_min >= t_star:
            low = EvalResult(0.0, 0.0, 0, True)
        else:
            low = integrate_adaptive(lower, 0.0, math.log(t_star / t_min), cfg)
    else:
        low = integrate_semiinfinite(lower, 0.0, "exponential", cfg)
    high = integrate_semiinfinite(upper, 0.0, "exponential", cfg)
    return EvalResult(low.value + high.value, low.err_estimate + high.err_estimate,
                      low.n_evals + high.n_evals, low.converged and high.converged,
                      cutoff=high.cutoff)
