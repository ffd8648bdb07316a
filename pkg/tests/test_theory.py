import math
import warnings

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.special import eval_chebyt

from logdet_lab import theory
from logdet_lab.rng import RngStream
from logdet_lab.testfn import DirichletMode, Interval, SmoothBump

I = Interval(-1.0, 1.0)
BUMP = SmoothBump(0.0, 0.3, I)
BUMP_R = SmoothBump(0.4, 0.3, I)
E1 = DirichletMode(1, I)

# Frozen values; the kernel double integral and the Chebyshev series agree on each to ~1e-10.
REFERENCE = {
    ("log", "bump0"): 2.377881400179773,
    ("cnt", "bump0"): 0.381209922532138,
    ("log", "e1"): 1.7597456658803055,
    ("cnt", "e1"): 0.4019268367868314,
    ("log", "cross"): 1.0463270563257767,
    ("cnt", "cross"): 0.2452568883343573,
}


def cheb_t(n):
    return lambda x: eval_chebyt(n, x / 2.0)


# -- kernels -------------------------------------------------------------------

def test_kernel_examples():
    assert theory.kernel_eval(theory.KernelSpec("log", 0.0), 0.0, 1.0) == 0.0
    assert theory.kernel_eval(theory.KernelSpec("log", 1.0), 0.0, 1.0) == pytest.approx(0.25, abs=1e-15)
    assert theory.kernel_eval(theory.KernelSpec("cnt", 0.0), 1.0, -1.0) == pytest.approx(
        math.log(2) / math.pi ** 2, abs=1e-15)
    assert math.log(2) / math.pi ** 2 == pytest.approx(0.0702305, abs=1e-7)


def test_kernel_cnt_matches_mpmath():
    E, Ep, s4 = mp.mpf("0.3"), mp.mpf("-1.2"), mp.mpf("0.75")
    root = mp.sqrt(4 - E ** 2) * mp.sqrt(4 - Ep ** 2)
    oracle = (-mp.log(abs(E - Ep)) + mp.log((4 - E * Ep + root) / 2) + s4 / 8 * E * Ep * root) / mp.pi ** 2
    assert theory.kernel_eval(theory.KernelSpec("cnt", 0.75), 0.3, -1.2) == pytest.approx(float(oracle), rel=1e-14)


@settings(max_examples=50, deadline=None)
@given(E=st.floats(-1.99, 1.99), Ep=st.floats(-1.99, 1.99), s4=st.floats(-2, 3))
def test_kernels_symmetric(E, Ep, s4):
    if E == Ep:
        return
    for kind in ("log", "cnt"):
        spec = theory.KernelSpec(kind, s4)
        assert theory.kernel_eval(spec, E, Ep) == theory.kernel_eval(spec, Ep, E)


@pytest.mark.parametrize("E, Ep", [(0.5, 0.5), (2.0, 0.1), (-0.3, -2.5)])
def test_kernel_domain_errors(E, Ep):
    with pytest.raises(ValueError):
        theory.kernel_eval(theory.KernelSpec("log"), E, Ep)


def test_kernelspec_rejects_bad_s4():
    with pytest.raises(ValueError):
        theory.KernelSpec("log", -2.5)


# -- Chebyshev coefficients ------------------------------------------------------

def test_cheb_coeff_examples():
    c = theory.cheb_coeffs(lambda x: x, 8).values
    np.testing.assert_allclose(c, [2, 0, 0, 0, 0, 0, 0, 0], atol=1e-13)
    c = theory.cheb_coeffs(lambda x: x * x, 8).values
    np.testing.assert_allclose(c, [0, 2, 0, 0, 0, 0, 0, 0], atol=1e-13)
    assert theory.cheb_coeff_generic(lambda x: x, 1) == pytest.approx(2.0, abs=1e-13)


def test_cheb_coeffs_of_chebyshev_polynomials_are_kronecker():
    for n in range(1, 33):
        c = theory.cheb_coeffs(cheb_t(n), 32).values
        expected = np.zeros(32)
        expected[n - 1] = 1.0
        assert np.max(np.abs(c - expected)) <= 1e-12


def test_cheb_coeffs_tail():
    c = theory.cheb_coeffs(lambda x: x, 20)
    assert c.n_max == 20 and c.tail <= 1e-13 and c[1] == pytest.approx(2.0)
    with pytest.raises(IndexError):
        c[21]


def test_point_coefficient_examples():
    assert theory.c_log_point(0.0, 1) == pytest.approx(0.0, abs=1e-15)
    assert theory.c_log_point(0.0, 2) == pytest.approx(1.0, abs=1e-15)
    assert theory.c_log_point(1.0, 3) == pytest.approx(2 / 3, abs=1e-15)
    assert theory.c_cnt_point(0.0, 1) == pytest.approx(-2 / math.pi, abs=1e-15)
    assert -2 / math.pi == pytest.approx(-0.636620, abs=1e-6)
    assert theory.c_cnt_point(0.0, 2) == pytest.approx(0.0, abs=1e-15)
    assert theory.c_cnt_point(math.sqrt(2), 4) == pytest.approx(0.0, abs=1e-15)
    with pytest.raises(ValueError):
        theory.c_log_point(2.0, 1)
    with pytest.raises(ValueError):
        theory.c_cnt_point(-2.1, 1)


@pytest.mark.parametrize("E", [-1.0, 0.0, 0.7])
def test_point_coefficients_against_quadrature(E):
    k = np.arange(1, 65)
    c = theory.cheb_coeffs(lambda x: np.log(np.abs(x - E)), 64, singular_points=[E]).values
    assert np.max(np.abs(c - theory.c_log_point(E, k))) <= 1e-9
    c = theory.cheb_coeffs(lambda x: (x <= E).astype(float), 64, singular_points=[E]).values
    assert np.max(np.abs(c - theory.c_cnt_point(E, k))) <= 1e-8


def test_test_coefficient_examples():
    assert abs(theory.c_log_test(BUMP, 1)) <= 1e-15
    assert abs(theory.c_log_test(E1, 1)) <= 1e-15
    for phi in (BUMP, BUMP_R, E1):
        assert theory.c_log_test(phi, 2) == pytest.approx(0.5 * phi.integrate(lambda E: 2 - E * E), abs=1e-13)
        expected = -phi.integrate(lambda E: E * np.sqrt(4 - E * E)) / (2 * math.pi)
        assert theory.c_cnt_test(phi, 2) == pytest.approx(expected, abs=1e-13)
    assert abs(theory.c_cnt_test(BUMP, 2)) <= 1e-15
    assert theory.c_cnt_test(E1, 1) == pytest.approx(theory.c_cnt_test_sine(E1, 1), abs=1e-10)


def test_test_coefficient_matches_transform_coefficients():
    c = theory.cheb_coeffs(BUMP.F, 24).values
    for k in range(1, 25):
        assert c[k - 1] == pytest.approx(theory.c_log_test(BUMP, k), abs=1e-10)


# -- Q and V forms ----------------------------------------------------------------

def test_Q_examples():
    assert theory.Q_form(theory.cheb_coeffs(lambda x: x, 16), 0.0).value == pytest.approx(2.0, abs=1e-12)
    for s4 in (0.0, -0.8192, 0.75, -2.0):
        q = theory.Q_form(theory.cheb_coeffs(lambda x: x * x, 16), s4).value
        assert q == pytest.approx(4 + 2 * s4, abs=1e-12)
    for n in (1, 3, 7, 12):
        assert theory.Q_form(theory.cheb_coeffs(cheb_t(n), 16), 0.5).value == pytest.approx(n / 2, abs=1e-12)


def test_V_examples():
    f, g = np.sin, lambda x: np.exp(x / 3)
    assert theory.V_form(f, f, 0.3, 64) == pytest.approx(theory.Q_form(theory.cheb_coeffs(f, 64), 0.3).value,
                                                         rel=1e-14)
    polar = 0.5 * (theory.Q_form(theory.cheb_coeffs(lambda x: f(x) + g(x), 64), 0.3).value
                   - theory.Q_form(theory.cheb_coeffs(f, 64), 0.3).value
                   - theory.Q_form(theory.cheb_coeffs(g, 64), 0.3).value)
    assert theory.V_form(f, g, 0.3, 64) == pytest.approx(polar, abs=1e-12)
    assert abs(theory.V_form(cheb_t(1), cheb_t(3), 0.7, 32)) <= 1e-13
    assert abs(theory.V_form(lambda x: x, lambda x: x * x, 0.0, 32)) <= 1e-13


@pytest.mark.parametrize("key, phi, psi", [
    ("bump0", BUMP, BUMP), ("e1", E1, E1), ("cross", BUMP, BUMP_R)])
@pytest.mark.parametrize("kind", ["log", "cnt"])
def test_series_matches_frozen_reference(kind, key, phi, psi):
    assert theory.V_series(kind, phi, psi, 0.0) == pytest.approx(REFERENCE[(kind, key)], rel=1e-9)


@pytest.mark.parametrize("s4", [0.0, -0.8192, 0.75])
@pytest.mark.parametrize("kind", ["log", "cnt"])
@pytest.mark.parametrize("phi, psi", [(BUMP, BUMP), (E1, E1), (BUMP, BUMP_R), (BUMP, E1)])
def test_kernel_route_matches_series(kind, s4, phi, psi):
    series = theory.V_series(kind, phi, psi, s4)
    quad = theory.V_quadrature(theory.KernelSpec(kind, s4), phi, psi)
    assert abs(quad - series) <= 1e-6 * abs(series)


@pytest.mark.parametrize("kind", ["log", "cnt"])
@pytest.mark.parametrize("phi", [BUMP, E1])
def test_Q_route_matches_series(kind, phi):
    f = phi.F if kind == "log" else phi.G
    q = theory.Q_form(theory.cheb_coeffs(f, 512), 0.4).value
    series = theory.V_series(kind, phi, phi, 0.4)
    assert abs(q - series) <= 1e-6 * series


def test_variance_positive_and_cross_positive():
    assert theory.V_quadrature(theory.KernelSpec("log"), BUMP, BUMP) > 0
    # supports within unit distance: -log|E - E'| > 0 throughout
    assert theory.V_series("log", BUMP, BUMP_R, 0.0) > 0


def test_zero_function_has_zero_variance():
    zero = 0.0 * BUMP
    assert theory.V_series("log", zero, BUMP, 0.3) == 0.0
    assert theory.V_series("cnt", zero, zero, 0.3) == 0.0


@pytest.mark.parametrize("a, b, s4", [tuple(r) for r in np.random.default_rng(42).uniform(
    [-3, -3, -2], [3, 3, 2], size=(4, 3))])
def test_bilinearity_and_symmetry(a, b, s4):
    combo = a * BUMP + b * E1
    for kind in ("log", "cnt"):
        lhs = theory.V_series(kind, combo, BUMP_R, s4)
        rhs = a * theory.V_series(kind, BUMP, BUMP_R, s4) + b * theory.V_series(kind, E1, BUMP_R, s4)
        assert abs(lhs - rhs) <= 1e-12 * (1 + abs(a) + abs(b))
        assert theory.V_series(kind, BUMP_R, combo, s4) == pytest.approx(lhs, abs=1e-13 * (1 + abs(a) + abs(b)))
        lq = theory.V_quadrature(theory.KernelSpec(kind, s4), combo, BUMP_R)
        rq = (a * theory.V_quadrature(theory.KernelSpec(kind, s4), BUMP, BUMP_R)
              + b * theory.V_quadrature(theory.KernelSpec(kind, s4), E1, BUMP_R))
        assert abs(lq - rq) <= 1e-12 * (1 + abs(a) + abs(b))


def test_series_warns_on_truncation():
    with pytest.warns(theory.SeriesTruncationWarning):
        theory.V_log_series(BUMP, BUMP, 0.0, 8)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        theory.V_log_series(BUMP, BUMP, 0.0)
    with pytest.raises(ValueError):
        theory.V_log_series(BUMP, BUMP, 0.0, 1)


# -- classical series ----------------------------------------------------------------

def test_log_series():
    val = theory.log_series_partial(math.pi / 3, 2 * math.pi / 3, 10 ** 6)
    assert abs(val - math.log(2)) <= 2e-5
    assert theory.log_series_exact(math.pi / 3, 2 * math.pi / 3) == pytest.approx(math.log(2), abs=1e-15)
    assert theory.log_series_partial(0.4, 1.3, 777) == theory.log_series_partial(1.3, 0.4, 777)
    with pytest.raises(ValueError):
        theory.log_series_partial(1.0, 1.0, 10)
    with pytest.raises(ValueError):
        theory.log_series_partial(1.0, -1.0, 10)


def test_sine_series():
    val = theory.sine_series_partial(math.pi / 2, math.pi / 6, 10 ** 6)
    assert abs(val - math.log(math.sqrt(3))) <= 2e-5
    assert math.log(math.sqrt(3)) == pytest.approx(0.5493061, abs=1e-7)
    a, b = math.pi / 2, 5 * math.pi / 6
    assert abs(theory.sine_series_partial(a, b, 10 ** 6) - theory.sine_series_exact(a, b)) <= 2e-5
    with pytest.raises(ValueError):
        theory.sine_series_partial(1.0, 1.0, 10)


def test_arcsine_coefficients():
    n = np.arange(1, 17)
    for m in (1, 2, 5, 16):
        expected = np.where(n == m, 0.5, 0.0)
        np.testing.assert_allclose(theory.arcsine_coeff(cheb_t(m), n), expected, atol=1e-13)
    np.testing.assert_allclose(theory.arcsine_coeff(lambda x: np.full_like(x, 3.0), n), 0.0, atol=1e-13)


def test_chebyshev_identity_for_bump():
    n = np.arange(1, 65)
    phi = SmoothBump(0.1, 0.5, I)
    assert np.max(np.abs(phi.cos_moments(64) + n * theory.arcsine_coeff(phi.F, n))) <= 1e-8


# -- limiting field --------------------------------------------------------------

def test_limit_field_weights():
    w = theory.limit_field_weights(0.0, 6)
    np.testing.assert_allclose(w, np.sqrt(2 / np.arange(1, 7)), rtol=0, atol=0)
    assert theory.limit_field_weights(-2.0, 4)[1] == 0.0
    assert theory.limit_field_weights(0.75, 4)[1] == pytest.approx(math.sqrt(1.375))
    with pytest.raises(ValueError):
        theory.limit_field_weights(-2.01, 4)


def test_pairing_of_zero_function_vanishes():
    sample = theory.synthesize_limit_field(0.2, 64, RngStream(1, 0))
    assert theory.pair(sample, 0.0 * BUMP) == 0.0


def test_pair_and_synth_agree():
    sample = theory.synthesize_limit_field(0.3, 128, RngStream(8, 3))
    X = theory.synth_pairings([BUMP], 0.3, 128, 4, 8)
    assert X[3, 0] == pytest.approx(theory.pair(sample, BUMP), abs=1e-13)


@pytest.mark.slow
def test_synthesized_variance_matches_series():
    X = theory.synth_pairings([BUMP], 0.0, 512, 10 ** 5, 77)[:, 0]
    var = X.var(ddof=1)
    se = math.sqrt((np.mean((X - X.mean()) ** 4) - var ** 2) / X.size)
    assert abs(var - theory.V_series("log", BUMP, BUMP, 0.0)) <= 3 * se
