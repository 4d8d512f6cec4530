import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from mehlerkit.errors import DomainError
from mehlerkit.quadrature import (
    EvalResult,
    QuadConfig,
    bochner_radial_ft,
    integrate_adaptive,
    integrate_semiinfinite,
    integrate_time_profile,
)

CFG = QuadConfig(rel_tol=1e-12)


def _consistent(res: EvalResult, cfg: QuadConfig) -> bool:
    return (not res.converged) or res.err_estimate <= max(cfg.abs_tol, cfg.rel_tol * abs(res.value))


def test_config_validation():
    with pytest.raises(DomainError):
        QuadConfig(rel_tol=1e-15)
    with pytest.raises(DomainError):
        QuadConfig(max_subdivisions=10 ** 7)
    with pytest.raises(DomainError):
        QuadConfig(abs_tol=-1.0)
    assert QuadConfig().with_(rel_tol=1e-6).rel_tol == 1e-6


def test_adaptive_examples():
    res = integrate_adaptive(lambda x: x * x, 0.0, 1.0, CFG)
    assert res.value == pytest.approx(1.0 / 3.0, rel=1e-15) and res.err_estimate <= 1e-12
    assert integrate_adaptive(lambda x: 1.0 / np.sqrt(x), 0.0, 1.0, CFG).value == pytest.approx(2.0, rel=1e-10)
    exact = (1.0 - math.exp(-20.0) * (math.cos(200.0) - 10.0 * math.sin(200.0))) / 101.0
    res = integrate_adaptive(lambda x: np.exp(-x) * np.cos(10.0 * x), 0.0, 20.0, CFG)
    assert res.value == pytest.approx(exact, rel=1e-11)
    assert _consistent(res, CFG)


def test_adaptive_domain():
    with pytest.raises(DomainError):
        integrate_adaptive(lambda x: x, 1.0, 0.0)
    with pytest.raises(DomainError):
        integrate_adaptive(lambda x: x, 0.0, math.inf)


def test_adaptive_reports_nonconvergence():
    res = integrate_adaptive(lambda x: np.sin(1.0 / x), 0.0, 1.0, QuadConfig(rel_tol=1e-14, max_subdivisions=20))
    assert not res.converged


def test_semiinfinite_examples():
    assert integrate_semiinfinite(lambda x: np.exp(-x), 0.0, cfg=CFG).value == pytest.approx(1.0, rel=1e-12)

    def f(x):
        with np.errstate(invalid="ignore"):
            return np.where(x == 0, 1.0, x / np.sinh(np.where(x == 0, 1.0, x)))

    assert integrate_semiinfinite(f, 0.0, cfg=CFG).value == pytest.approx(math.pi ** 2 / 4.0, rel=1e-11)
    res = integrate_semiinfinite(lambda x: 1.0 / (1.0 + x * x), 0.0, "algebraic", CFG, power=2.0)
    assert res.value == pytest.approx(math.pi / 2.0, rel=1e-11)
    with pytest.raises(DomainError):
        integrate_semiinfinite(lambda x: x, 0.0, "algebraic", CFG, power=1.0)
    with pytest.raises(DomainError):
        integrate_semiinfinite(lambda x: x, 0.0, "sideways", CFG)


def test_semiinfinite_records_cutoff():
    res = integrate_semiinfinite(lambda x: np.exp(-x), 0.0, cfg=CFG)
    assert res.cutoff is not None and res.cutoff > 30.0


def test_bochner_examples():
    gauss = lambda r: np.exp(-math.pi * r * r)  # noqa: E731
    assert bochner_radial_ft(gauss, 2, 0.0, CFG).value == pytest.approx(1.0, rel=1e-11)
    assert bochner_radial_ft(gauss, 3, 0.7, CFG).value == pytest.approx(math.exp(-math.pi * 0.49), rel=1e-10)


def test_bochner_k1_is_cosine_transform():
    f = lambda r: np.exp(-r) * (1.0 + r)  # noqa: E731
    xi = 0.37
    cosine = 2.0 * integrate_semiinfinite(lambda r: f(r) * np.cos(2.0 * math.pi * xi * r), 0.0, cfg=CFG).value
    # 2 int_0^inf e^{-r}(1+r) cos(w r) dr = 2 (1/(1+w^2) + (1-w^2)/(1+w^2)^2)
    w = 2.0 * math.pi * xi
    closed = 2.0 * (1.0 / (1.0 + w * w) + (1.0 - w * w) / (1.0 + w * w) ** 2)
    assert bochner_radial_ft(f, 1, xi, CFG).value == pytest.approx(closed, rel=1e-11)
    assert cosine == pytest.approx(closed, rel=1e-11)


@pytest.mark.parametrize("k", [1, 2, 3, 4])
def test_gaussian_eigenfunction(k):
    cfg = QuadConfig(rel_tol=1e-10)
    xi = np.array([0.0, 0.3, 0.8, 1.5])
    res = bochner_radial_ft(lambda r: np.exp(-math.pi * r * r), k, xi, cfg)
    assert np.allclose(res.value, np.exp(-math.pi * xi ** 2), rtol=10 * cfg.rel_tol, atol=1e-13)


def test_bochner_continuity_at_zero():
    f = lambda r: np.exp(-r * r)  # noqa: E731
    base = bochner_radial_ft(f, 3, 0.0, CFG).value
    gaps = [abs(bochner_radial_ft(f, 3, xi, CFG).value - base) for xi in (1e-2, 1e-3, 1e-4)]
    assert gaps[0] > gaps[1] > gaps[2] and gaps[2] < 1e-6 * base


@given(st.integers(1, 4), st.floats(0.0, 3.0), st.floats(0.2, 3.0))
def test_bochner_positivity(k, xi, a):
    f = lambda r: np.exp(-a * r) * (1.0 + r * r)  # noqa: E731
    at0 = bochner_radial_ft(f, k, 0.0, CFG).value
    assert abs(bochner_radial_ft(f, k, xi, CFG).value) <= at0 * (1.0 + 1e-12)


@given(st.floats(-3.0, 3.0), st.floats(-3.0, 3.0), st.floats(0.5, 4.0), st.floats(0.1, 5.0))
def test_linearity(ca, cb, w, lo_hi):
    f = lambda x: np.exp(-x) * np.cos(w * x)  # noqa: E731
    g = lambda x: 1.0 / (1.0 + x * x)  # noqa: E731
    rf = integrate_adaptive(f, 0.0, lo_hi, CFG)
    rg = integrate_adaptive(g, 0.0, lo_hi, CFG)
    both = integrate_adaptive(lambda x: ca * f(x) + cb * g(x), 0.0, lo_hi, CFG)
    bound = abs(ca) * rf.err_estimate + abs(cb) * rg.err_estimate + both.err_estimate + 1e-14
    assert abs(both.value - (ca * rf.value + cb * rg.value)) <= 10.0 * bound


@given(st.floats(-4.0, 4.0), st.floats(0.01, 50.0))
def test_convergence_invariant(c, width):
    cfg = QuadConfig(rel_tol=1e-10)
    res = integrate_adaptive(lambda x: np.exp(c * np.sin(x)), 0.0, width, cfg)
    assert _consistent(res, cfg)


def test_time_profile_examples():
    assert integrate_time_profile(lambda t: t ** -2 * math.exp(-1.0 / t), 1.0, CFG).value == pytest.approx(1.0, rel=1e-11)
    expected = 2.0 ** -0.5 * math.gamma(0.5)
    g = lambda t: t ** -1.5 * math.exp(-2.0 / t)  # noqa: E731
    assert integrate_time_profile(g, 0.5, CFG).value == pytest.approx(expected, rel=1e-10)
    assert integrate_time_profile(lambda t: math.exp(-t), 1.0, CFG).value == pytest.approx(1.0, rel=1e-11)
    with pytest.raises(DomainError):
        integrate_time_profile(g, 0.0, CFG)


@given(st.floats(2.2, 8.0), st.floats(0.1, 10.0), st.floats(0.05, 20.0))
def test_time_profile_closed_form(kappa, a, t_star):
    # int_0^inf t^(-kappa/2) exp(-a/t) dt = a^(1-kappa/2) Gamma(kappa/2 - 1)
    g = lambda t: t ** (-kappa / 2) * math.exp(-a / t)  # noqa: E731
    expected = a ** (1 - kappa / 2) * math.gamma(kappa / 2 - 1)
    assert integrate_time_profile(g, t_star, QuadConfig(rel_tol=1e-10)).value == pytest.approx(expected, rel=1e-8)
