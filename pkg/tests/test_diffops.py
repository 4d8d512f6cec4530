import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from mehlerkit import kernels as K
from mehlerkit.diffops import (
    StencilConfig,
    bessel_apply,
    grushin_residual,
    neumann_trace,
    ou_residual,
    pflow_radial_residual,
    richardson_slopes,
    riccati_check,
)
from mehlerkit.errors import DomainError
from mehlerkit.kernels import PFlowParams, RadialPoint
from mehlerkit.quadrature import QuadConfig

CFG = QuadConfig(rel_tol=1e-14)


def test_stencil_config_validation():
    with pytest.raises(DomainError):
        StencilConfig(h_r=0.0)
    with pytest.raises(DomainError):
        StencilConfig(scheme="upwind")
    assert StencilConfig.uniform(0.1) == StencilConfig(0.1, 0.1, 0.1)


def test_bessel_apply_examples():
    assert bessel_apply(lambda r: r * r, 1.3, 1.0, 1e-2) == pytest.approx(4.0, rel=1e-12)
    r, a = 1.5, 2.4
    e = math.exp(-r * r)
    exact = 4 * r * r * e - 2 * e - (a / r) * 2 * r * e
    assert bessel_apply(lambda x: math.exp(-x * x), r, a, 1e-4) == pytest.approx(exact, rel=1e-6)


def test_bessel_apply_warns_near_axis():
    with pytest.warns(RuntimeWarning):
        bessel_apply(lambda r: r, 0.01, 1.0, 0.01)


def test_grushin_trivial_and_caloric():
    at = RadialPoint(1.25, 0.375, 0.875)
    cfg = StencilConfig.uniform(2.0 ** -6)
    assert grushin_residual(lambda r, s, t: 1.0, 1.3, 2, at, cfg) == 0.0
    for alpha in (0.4, 1.0, 2.7):
        res = grushin_residual(lambda r, s, t, a=alpha: 4 * a * t + r * r, alpha, 1, at, cfg)
        assert abs(res) <= 1e-10


def test_grushin_rejects_axis():
    with pytest.raises(DomainError):
        grushin_residual(lambda r, s, t: 1.0, 1.0, 1, RadialPoint(0.01, 0.3, 1.0), StencilConfig.uniform(0.01))
    with pytest.raises(DomainError):
        grushin_residual(lambda r, s, t: 1.0, 1.0, 2, RadialPoint(1.0, 0.01, 1.0), StencilConfig.uniform(0.01))


@given(st.floats(0.3, 3.0), st.integers(1, 4), st.floats(-2.0, 2.0))
def test_grushin_vertical_caloric(alpha, k, c):
    # u = s^2 - k r^4 / (16 (1 + alpha)) + c: (r^2/4) Lap_s u = k r^2 / 2 cancels B u exactly
    at = RadialPoint(1.25, 0.375, 0.875)

    def u(r, s, t):
        return s * s - k * r ** 4 / (16.0 * (1.0 + alpha)) + c

    h = 2.0 ** -7
    res = grushin_residual(u, alpha, k, at, StencilConfig.uniform(h))
    # only the r^4 stencil truncation remains: O(h^2) with a small constant
    assert abs(res) <= 10.0 * h * h


def test_grushin_residual_of_kernel_is_second_order():
    alpha, k, rho = 1.5, 1, 0.6
    at = RadialPoint(1.0, 0.7, 0.8)

    def u(r, s, t):
        return K.mehler_kernel_k(alpha, k, r, rho, s, t, CFG).value

    slopes = richardson_slopes(lambda h: grushin_residual(u, alpha, k, at, StencilConfig.uniform(h)),
                               [0.02, 0.01, 0.005])
    assert all(abs(sl - 2.0) <= 0.1 for sl in slopes)


def test_neumann_trace_examples():
    probes = [0.2, 0.1, 0.05, 0.025]
    assert neumann_trace(lambda r: 3.0, 0.7, probes) == [0.0] * 4
    for alpha in (0.3, 0.8, 2.0):
        vals = neumann_trace(lambda r, a=alpha: r ** (2 - 2 * a), alpha, probes)
        assert np.allclose(vals, 2 - 2 * alpha, atol=1e-6)
    trace = neumann_trace(lambda r: K.mehler_kernel_k(0.8, 1, r, 1.0, 0.3, 1.0, CFG).value, 0.8, probes)
    mags = np.abs(trace)
    assert np.all(np.diff(mags) < 0)
    with pytest.raises(DomainError):
        neumann_trace(lambda r: r, 1.0, [0.1, 0.0])


def test_ou_residual_examples():
    cfg = StencilConfig.uniform(1e-3)
    assert ou_residual(lambda x, t: 1.0, 1.0, [0.2, 0.3], 0.5, cfg) == 0.0
    # exact in space; the time stencil leaves (h^2/6) u_ttt ~ 1e-7
    res = ou_residual(lambda x, t: x[0] * math.exp(-2.0 * 0.7 * t), 0.7, [0.4, -0.2, 1.1], 0.5, cfg)
    assert abs(res) <= 1e-6


@given(st.floats(0.1, 2.0), st.floats(-1.5, 1.5), st.floats(0.2, 1.5))
def test_ou_residual_of_kernel(omega, y, t):
    # the kernel itself solves the equation in x for fixed y
    u = lambda x, tt: K.ou_mehler_kernel(1, omega, x, [y], tt)  # noqa: E731
    res = ou_residual(u, omega, [0.3], t, StencilConfig.uniform(1e-3))
    scale = abs(u(np.array([0.3]), t)) + 1.0
    assert abs(res) <= 1e-4 * scale


def test_riccati_ansatz_and_identity():
    omega, alpha, at = 1.3, 1.5, (1.1, 0.4)
    h = lambda r, t: 0.5 * omega * r * r + 2 * alpha * omega * t  # noqa: E731
    phi = lambda r, t: omega * omega * r * r  # noqa: E731
    f = lambda r, t: math.exp(-4 * omega * t) * (r * r - alpha / omega)  # noqa: E731
    ric, rv, rf = riccati_check(h, phi, f, alpha, at, StencilConfig.uniform(0.01))
    assert abs(ric) <= 1e-10
    assert abs(rv) <= 1e-3 and abs(rf) <= 1e-3
    slopes = richardson_slopes(lambda s: riccati_check(h, phi, f, alpha, at, StencilConfig.uniform(s))[1],
                               [0.02, 0.01, 0.005])
    assert min(slopes) >= 1.9


@given(st.floats(-1.0, 1.0), st.floats(-1.0, 1.0), st.floats(0.5, 2.5))
def test_riccati_identity_property(c1, c2, alpha):
    # the identity res_v + v res_riccati = exp(-h) res_f holds up to stencil truncation, O(h^2)
    h = lambda r, t: c1 * r ** 3 + math.sin(t) * r  # noqa: E731
    f = lambda r, t: math.cos(r) * math.exp(-t) + c2 * r * t  # noqa: E731
    phi = lambda r, t: r * r * t  # noqa: E731
    at = (1.1, 0.4)

    def gap(step):
        ric, rv, rf = riccati_check(h, phi, f, alpha, at, StencilConfig.uniform(step))
        v = math.exp(-h(*at)) * f(*at)
        return rv + v * ric - math.exp(-h(*at)) * rf

    g1, g2 = gap(0.02), gap(0.01)
    assert abs(g2) <= 1e3 * 0.01 ** 2
    if abs(g2) > 1e-8:
        assert abs(math.log2(abs(g1 / g2)) - 2.0) <= 0.1


def test_pflow_residual_examples():
    cfg = StencilConfig.uniform(1e-2)
    assert pflow_radial_residual(lambda r, t: 2.0, 3, 2.5, (1.0, 1.0), cfg) == 0.0
    res = pflow_radial_residual(lambda r, t: r * r + (2 * 1.5 + 2 * 2) * t, 3, 2.5, (1.0, 1.0), cfg)
    assert abs(res) <= 1e-10
    with pytest.raises(DomainError):
        pflow_radial_residual(lambda r, t: 1.0, 3, 1.0, (1.0, 1.0), cfg)


def test_gp_euclid_residual_second_order():
    pp = PFlowParams(3, 2.5)
    f = lambda r, t: K.gp_euclid(pp, r, t)  # noqa: E731
    slopes = richardson_slopes(lambda h: pflow_radial_residual(f, 3, 2.5, (1.2, 0.7), StencilConfig.uniform(h)),
                               [0.02, 0.01, 0.005])
    assert all(abs(s - 2.0) <= 0.1 for s in slopes)
    assert abs(pflow_radial_residual(f, 3, 2.5, (1.0, 1.0), StencilConfig.uniform(1e-3))) <= 1e-6


@given(st.integers(2, 6), st.floats(1.2, 5.0), st.floats(0.5, 2.0), st.floats(0.3, 2.0))
def test_gp_euclid_solves_radial_flow(n, p, r, t):
    pp = PFlowParams(n, p)
    f = lambda rr, tt: K.gp_euclid(pp, rr, tt)  # noqa: E731
    res = [pflow_radial_residual(f, n, p, (r, t), StencilConfig.uniform(h)) for h in (4e-3, 2e-3)]
    # pure truncation: second order, and small against the size of the terms
    assert abs(res[1]) <= 1e-3 * (abs(f(r, t)) / t + 1.0) * pp.kappa ** 2
    if abs(res[1]) > 1e-9 * abs(f(r, t)):
        assert abs(math.log2(abs(res[0] / res[1])) - 2.0) <= 0.15
