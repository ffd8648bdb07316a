import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from logdet_lab.quadrature import QuadratureRule, composite_rule, log_integral
from logdet_lab.testfn import (BUMP_MASS, DirichletMode, Interval, LinearCombination, SmoothBump,
                               F_transform, G_transform, d_coeff, dirichlet_modes, evaluate, from_config)

I = Interval(-1.0, 1.0)
mp.mp.dps = 30


def mp_bump(center, halfwidth):
    mass = mp.quad(lambda t: mp.exp(-1 / (1 - t * t)), [-1, 0, 1])

    def f(E):
        t = (E - center) / halfwidth
        if abs(t) >= 1:
            return mp.mpf(0)
        return mp.exp(-1 / (1 - t * t)) / (halfwidth * mass)
    return f


def mp_F(f, lo, hi, x):
    pts = sorted({mp.mpf(lo), mp.mpf(hi)} | ({mp.mpf(x)} if lo < x < hi else set()))
    return float(mp.quad(lambda E: f(E) * mp.log(abs(E - x)), pts))


def test_bump_mass_matches_mpmath():
    assert BUMP_MASS == pytest.approx(float(mp.quad(lambda t: mp.exp(-1 / (1 - t * t)), [-1, 0, 1])),
                                      rel=1e-14)


def test_eval_examples():
    assert evaluate(DirichletMode(1, I), 0.0) == pytest.approx(1.0, abs=1e-15)
    assert evaluate(SmoothBump(0.0, 0.5, I), 0.5) == 0.0
    oracle = float(mp_bump(0, 0.5)(0))
    assert evaluate(SmoothBump(0.0, 0.5, I), 0.0) == pytest.approx(oracle, rel=1e-14)
    assert SmoothBump(0.0, 0.5, I).peak == pytest.approx(oracle, rel=1e-14)


def test_zero_outside_support():
    e3 = DirichletMode(3, I)
    assert e3(np.array([-1.5, 1.0001, 7.0])).tolist() == [0.0, 0.0, 0.0]


def test_bump_must_sit_inside_interval():
    with pytest.raises(ValueError):
        SmoothBump(0.8, 0.3, I)


@pytest.mark.parametrize("order", [4, 16, 32])
def test_quadrature_rule_polynomial_exactness(order):
    x, w = composite_rule([-1.0, 0.2, 1.0], order)
    for p in range(2 * order):
        exact = (1 - (-1) ** (p + 1)) / (p + 1)
        assert np.dot(w, x ** p) == pytest.approx(exact, abs=1e-13)
    QuadratureRule(order=order)


@pytest.mark.parametrize("x", [-1.0, -0.3, 0.0, 0.7, 1.0, 2.5])
def test_log_integral_closed_form(x):
    oracle = float(mp.quad(lambda E: mp.log(abs(E - x)), sorted({-1, 1} | ({x} if -1 < x < 1 else set()))))
    assert log_integral(-1.0, 1.0, x) == pytest.approx(oracle, abs=1e-14)


def test_F_far_field():
    phi = SmoothBump(0.0, 0.5, I)
    assert abs(F_transform(phi, 100.0) - math.log(100.0)) <= 1e-3
    oracle = mp_F(mp_bump(0, 0.5), -0.5, 0.5, 100)
    assert F_transform(phi, 100.0) == pytest.approx(oracle, abs=1e-12)


@pytest.mark.parametrize("x", [0.3, 2.5])
def test_F_symmetry(x):
    phi = SmoothBump(0.0, 0.5, I)
    assert F_transform(phi, x) == pytest.approx(F_transform(phi, -x), abs=1e-13)


@pytest.mark.parametrize("x", [-1.0, 1.0])
def test_F_dirichlet_endpoint_matches_adaptive_oracle(x):
    oracle = mp_F(lambda E: mp.sin(mp.pi * (E + 1) / 2), -1, 1, x)
    e1 = DirichletMode(1, I)
    assert abs(F_transform(e1, x) - oracle) <= 1e-8
    assert abs(e1.F_quadrature(np.array([x]))[0] - oracle) <= 1e-8


@pytest.mark.parametrize("x", [-0.95, -0.31, -0.3, 0.0, 0.12345, 0.7, 1.5, 3.0])
def test_F_bump_matches_mpmath(x):
    phi = SmoothBump(-0.1, 0.4, I)
    assert F_transform(phi, x) == pytest.approx(mp_F(mp_bump(-0.1, 0.4), -0.5, 0.3, x), abs=1e-11)


@pytest.mark.parametrize("k", [1, 2, 5, 12])
def test_F_dirichlet_closed_form_matches_quadrature(k):
    ek = DirichletMode(k, I)
    x = np.array([-1.0, -0.6, 0.0, 0.33, 0.999, 1.0, 1.7, 40.0])
    np.testing.assert_allclose(ek.F(x), ek.F_quadrature(x), atol=1e-11)


@pytest.mark.parametrize("x", [0.4, -0.45, 1.5])
def test_F_finite_difference_matches_analytic_derivative(x):
    phi = SmoothBump(0.0, 0.3, I)
    h = 1e-4
    fd = (F_transform(phi, x + h) - F_transform(phi, x - h)) / (2 * h)
    oracle = float(mp.quad(lambda E: mp_bump(0, 0.3)(E) / (x - E), [-0.3, 0, 0.3]))
    assert abs(fd - oracle) <= 1e-5


@pytest.mark.parametrize("k", [1, 2, 3, 8])
def test_G_dirichlet_examples(k):
    ek = DirichletMode(k, I)
    L = 2.0
    total = math.sqrt(2 / L) * (L / (math.pi * k)) * (1 - (-1) ** k)
    assert G_transform(ek, -1.0) == pytest.approx(total, abs=1e-14)
    assert G_transform(ek, -3.0) == pytest.approx(total, abs=1e-14)
    assert G_transform(ek, 1.0) == 0.0
    for x in (-0.7, 0.1, 0.9):
        expected = math.sqrt(2 / L) * (L / (math.pi * k)) * (math.cos(math.pi * k * (x + 1) / L) - (-1) ** k)
        assert G_transform(ek, x) == pytest.approx(expected, abs=1e-14)
        assert ek.G_quadrature(np.array([x]))[0] == pytest.approx(expected, abs=1e-13)


def test_G_e1_total_is_four_over_pi():
    assert G_transform(DirichletMode(1, I), -1.0) == pytest.approx(4 / math.pi, abs=1e-15)


@settings(max_examples=30, deadline=None)
@given(c=st.floats(-0.5, 0.5), h=st.floats(0.05, 0.45))
def test_G_bump_monotone_with_unit_mass(c, h):
    phi = SmoothBump(c, h, I)
    x = np.linspace(-1.2, 1.2, 301)
    g = phi.G(x)
    assert np.all(np.diff(g) <= 1e-15)
    assert phi.G(np.array([-1.0]))[0] - phi.G(np.array([1.0]))[0] == pytest.approx(1.0, abs=1e-12)
    assert phi.G(np.array([c]))[0] == pytest.approx(0.5, abs=1e-12)


def test_dirichlet_orthonormality():
    modes = dirichlet_modes(64, I)
    x, w = composite_rule(np.linspace(-1, 1, 65), 48)
    B = np.array([m(x) for m in modes])
    gram = (B * w) @ B.T
    assert np.max(np.abs(gram - np.eye(64))) <= 1e-12


def test_d_coeff_examples():
    e1 = DirichletMode(1, I)
    assert abs(d_coeff(e1, 1)) <= 1e-15
    bump = SmoothBump(0.0, 0.4, I)
    assert all(abs(d_coeff(bump, n)) <= 1e-14 for n in (1, 3, 5, 7, 31))
    E = np.linspace(-1, 1, 10 ** 6)
    vals = np.sin(np.pi * (E + 1) / 2) * (E * E / 2 - 1)
    oracle = np.trapezoid(vals, E) if hasattr(np, "trapezoid") else np.trapz(vals, E)
    assert abs(d_coeff(e1, 2) - oracle) <= 1e-9


def test_bump_pairings_decay_superpolynomially():
    d = np.abs(SmoothBump(0.0, 0.5, I).cos_moments(2048))
    n = np.arange(1, 2049, dtype=float)
    scaled = n ** 4 * d
    C4 = scaled[:128].max()
    assert scaled.max() <= 2 * C4
    # past the crossover the n^4-weighted envelope collapses
    assert scaled[1024:].max() < 0.05 * scaled.max()
    assert (n ** 6 * d)[1536:].max() < (n ** 6 * d)[768:1024].max()


def test_linear_combination_is_linear():
    a, b = SmoothBump(0.0, 0.3, I), DirichletMode(2, I)
    combo = 2.0 * a - b
    assert isinstance(combo, LinearCombination)
    x = np.array([-0.9, -0.1, 0.25, 1.3])
    np.testing.assert_allclose(combo(x), 2 * a(x) - b(x), atol=1e-15)
    np.testing.assert_allclose(combo.F(x), 2 * a.F(x) - b.F(x), atol=1e-13)
    np.testing.assert_allclose(combo.G(x), 2 * a.G(x) - b.G(x), atol=1e-13)
    np.testing.assert_allclose(combo.cos_moments(16), 2 * a.cos_moments(16) - b.cos_moments(16), atol=1e-13)


def test_from_config():
    assert from_config({"type": "dirichlet", "k": 3}, I).name == "e3"
    bump = from_config({"type": "bump", "center": 0.1, "halfwidth": 0.2}, I)
    assert isinstance(bump, SmoothBump) and bump.center == 0.1
    with pytest.raises(ValueError):
        from_config({"type": "spline"}, I)
