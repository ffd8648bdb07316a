"""Closed-form covariance theory of the log-determinant and counting fields.

Chebyshev coefficients here are those of ``f(2 cos theta)``::

    c_k(f) = (1/pi) int_{-pi}^{pi} f(2 cos t) cos(k t) dt,

the variance form is ``Q(f) = 1/2 sum_k k c_k(f)^2 + s4/2 c_2(f)^2`` and
``V`` is its polarization.  Each field covariance is available by two
independent routes (kernel double integral and Chebyshev series), which
serve as oracles for one another.
"""

import math
import warnings
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.special import eval_chebyu

from .quadrature import composite_rule, graded_breakpoints, QuadratureRule
from .rng import RngStream
from .spectra import map_replicas

DEFAULT_N_MAX = 512
DEFAULT_N_QUAD = 8192
TAIL_WARN_RATIO = 1e-10


class SeriesTruncationWarning(RuntimeWarning):
    pass


class SeriesSum(NamedTuple):
    value: float
    tail: float


def fsum_terms(terms):
    """Ascending-index sum with error-free accumulation."""
    return math.fsum(np.asarray(terms, dtype=float).tolist())


def _decile_tail(terms):
    terms = np.asarray(terms, dtype=float)
    start = terms.size - max(1, terms.size // 10)
    return abs(fsum_terms(terms[start:]))


def _check_tail(result, what):
    if result.tail > TAIL_WARN_RATIO * abs(result.value) and result.tail > 1e-300:
        warnings.warn(f"{what}: last-decile tail {result.tail:.3e} exceeds "
                      f"{TAIL_WARN_RATIO:g} of the sum {result.value:.6e}",
                      SeriesTruncationWarning, stacklevel=3)
    return result


# -- kernels -----------------------------------------------------------------

@dataclass(frozen=True)
class KernelSpec:
    kind: str
    s4: float = 0.0

    def __post_init__(self):
        if self.kind not in ("log", "cnt"):
            raise ValueError("kernel kind must be 'log' or 'cnt'")
        if not self.s4 >= -2.0:
            raise ValueError("s4 must be >= -2")


def _bulk(E, name):
    E = np.asarray(E, dtype=float)
    if np.any(np.abs(E) >= 2.0):
        raise ValueError(f"{name} must lie in (-2, 2)")
    return E


def kernel_eval(spec, E, Ep):
    E, Ep = _bulk(E, "E"), _bulk(Ep, "E'")
    if np.any(E == Ep):
        raise ValueError("kernels are singular on the diagonal E = E'")
    log_gap = np.log(np.abs(E - Ep))
    if spec.kind == "log":
        # group the symmetric products first so swapping E and E' is bit-exact
        out = -log_gap + spec.s4 / 8.0 * ((2.0 - E * E) * (2.0 - Ep * Ep))
    else:
        root = np.sqrt(4.0 - E * E) * np.sqrt(4.0 - Ep * Ep)
        out = (-log_gap + np.log((4.0 - E * Ep + root) / 2.0)
               + spec.s4 / 8.0 * ((E * Ep) * root)) / math.pi ** 2
    return out if out.ndim else float(out)


# -- Chebyshev coefficients ----------------------------------------------------

@dataclass(frozen=True)
class ChebCoeffs:
    """Coefficients c_1..c_{n_max}; ``values[k-1]`` holds c_k."""

    values: np.ndarray

    @property
    def n_max(self):
        return self.values.size

    @property
    def tail(self):
        start = self.n_max - max(1, self.n_max // 10)
        return float(np.max(np.abs(self.values[start:])))

    def __getitem__(self, k):
        if not 1 <= k <= self.n_max:
            raise IndexError(k)
        return float(self.values[k - 1])


def _singular_theta_rule(points, n_max):
    cuts = sorted({0.0, math.pi, *(math.acos(p / 2.0) for p in points)})
    nodes, weights = [], []
    for t0, t1 in zip(cuts[:-1], cuts[1:]):
        panels = max(2, math.ceil((t1 - t0) / math.pi * (8 + n_max / 2)))
        x, w = composite_rule(graded_breakpoints(t0, t1, panels, levels=24), 32)
        nodes.append(x)
        weights.append(w)
    return np.concatenate(nodes), np.concatenate(weights)


def cheb_coeffs(f, n_max, n_quad=DEFAULT_N_QUAD, singular_points=None):
    """c_1..c_{n_max} of `f` on [-2, 2].

    The default is the uniform-theta trapezoid rule with `n_quad` nodes,
    evaluated by FFT; it is spectrally accurate when f(2 cos t) is smooth.
    For integrands with log or jump singularities at known points E_j,
    pass `singular_points`: the theta range is split at arccos(E_j/2) and
    integrated by Gauss-Legendre panels graded toward each split.
    """
    if singular_points is None:
        if n_max >= n_quad // 2:
            raise ValueError("n_max must be below n_quad/2 for the trapezoid rule")
        theta = 2.0 * math.pi * np.arange(n_quad) / n_quad
        vals = np.asarray(f(2.0 * np.cos(theta)), dtype=float)
        coef = np.fft.rfft(vals).real * (2.0 / n_quad)
        return ChebCoeffs(coef[1:n_max + 1])
    theta, w = _singular_theta_rule(singular_points, n_max)
    wf = w * np.asarray(f(2.0 * np.cos(theta)), dtype=float)
    k = np.arange(1, n_max + 1)
    return ChebCoeffs((2.0 / math.pi) * (np.cos(k[:, None] * theta) @ wf))


def cheb_coeff_generic(f, k, n_quad=DEFAULT_N_QUAD, singular_points=None):
    if k < 1:
        raise ValueError("k must be positive")
    return cheb_coeffs(f, k, n_quad, singular_points)[k]


def _alpha(E):
    return np.arccos(_bulk(E, "E") / 2.0)


def c_log_point(E, k):
    """c_k of log|. - E|: -(2/k) cos(k arccos(E/2))."""
    out = -(2.0 / k) * np.cos(k * _alpha(E))
    return out if np.ndim(out) else float(out)


def c_cnt_point(E, k):
    """c_k of the step 1{x <= E}: -(2/(pi k)) sin(k arccos(E/2))."""
    out = -(2.0 / (math.pi * k)) * np.sin(k * _alpha(E))
    return out if np.ndim(out) else float(out)


def c_log_test(phi, k):
    from .testfn import d_coeff
    return -(2.0 / k) * d_coeff(phi, k)


def c_cnt_test(phi, k):
    """c_k(G_phi) through the second-kind form with U_{k-1}(E/2) sqrt(4 - E^2)."""
    if k < 1:
        raise ValueError("k must be positive")
    extra = math.ceil(k * (phi.support[1] - phi.support[0]) / 8.0)
    integral = phi.integrate(lambda E: eval_chebyu(k - 1, E / 2.0) * np.sqrt(4.0 - E * E), extra)
    return -integral / (math.pi * k)


def c_cnt_test_sine(phi, k):
    """c_k(G_phi) through the sine form -(2/(pi k)) int phi sin(k alpha)."""
    return -(2.0 / (math.pi * k)) * float(phi.sin_moments(k)[k - 1])


# -- variance forms ------------------------------------------------------------

def _coeff_array(c):
    return c.values if isinstance(c, ChebCoeffs) else np.asarray(c, dtype=float)


def bilinear_form(c, d, s4):
    """1/2 sum_k k c_k d_k + s4/2 c_2 d_2, with its last-decile tail."""
    c, d = _coeff_array(c), _coeff_array(d)
    n = min(c.size, d.size)
    k = np.arange(1, n + 1)
    terms = 0.5 * k * c[:n] * d[:n]
    extra = 0.5 * s4 * c[1] * d[1] if n >= 2 else 0.0
    return SeriesSum(fsum_terms(np.append(terms, extra)), _decile_tail(terms))


def Q_form(c, s4):
    """Q(f) = 1/2 sum k c_k^2 + s4/2 c_2^2 from coefficients c_1, c_2, ..."""
    return bilinear_form(c, c, s4)


def V_form(f, g, s4, n_max=DEFAULT_N_MAX, n_quad=DEFAULT_N_QUAD):
    """V(f, g) = (Q(f+g) - Q(f) - Q(g))/2, evaluated in bilinear form."""
    cf = cheb_coeffs(f, n_max, n_quad)
    cg = cheb_coeffs(g, n_max, n_quad)
    return bilinear_form(cf, cg, s4).value


def V_log_series(phi, psi, s4, n_max=DEFAULT_N_MAX):
    """sum_n (2/n) d_n(phi) d_n(psi) + s4/2 d_2(phi) d_2(psi)."""
    if n_max < 2:
        raise ValueError("n_max must be at least 2")
    d_phi = phi.cos_moments(n_max)
    d_psi = d_phi if psi is phi else psi.cos_moments(n_max)
    n = np.arange(1, n_max + 1)
    terms = 2.0 / n * d_phi * d_psi
    value = fsum_terms(np.append(terms, 0.5 * s4 * d_phi[1] * d_psi[1]))
    return _check_tail(SeriesSum(value, _decile_tail(terms)), "V_log series")


def V_cnt_series(phi, psi, s4, n_max=DEFAULT_N_MAX):
    """(2/pi^2) sum_k (1/k) S_k(phi) S_k(psi) + s4/2 c_2(G_phi) c_2(G_psi),
    with S_k = int phi sin(k arccos(E/2)) dE and c_2(G) = -S_2/pi."""
    if n_max < 2:
        raise ValueError("n_max must be at least 2")
    s_phi = phi.sin_moments(n_max)
    s_psi = s_phi if psi is phi else psi.sin_moments(n_max)
    k = np.arange(1, n_max + 1)
    terms = 2.0 / math.pi ** 2 / k * s_phi * s_psi
    c2 = 0.5 * s4 * (s_phi[1] / math.pi) * (s_psi[1] / math.pi)
    value = fsum_terms(np.append(terms, c2))
    return _check_tail(SeriesSum(value, _decile_tail(terms)), "V_cnt series")


def V_series(kind, phi, psi, s4, n_max=DEFAULT_N_MAX):
    fn = V_log_series if kind == "log" else V_cnt_series
    return fn(phi, psi, s4, n_max).value


def _outer_rule(phi, psi):
    """Nodes on supp(psi) graded toward its ends and toward the ends of supp(phi)."""
    s0, s1 = psi.support
    cuts = sorted({s0, s1, *(p for p in phi.support if s0 < p < s1)})
    nodes, weights = [], []
    width = s1 - s0
    for t0, t1 in zip(cuts[:-1], cuts[1:]):
        panels = max(2, math.ceil(psi.base_panels * (t1 - t0) / width))
        x, w = QuadratureRule(panels=panels).endpoint_graded(t0, t1)
        nodes.append(x)
        weights.append(w)
    return np.concatenate(nodes), np.concatenate(weights)


def V_quadrature(spec, phi, psi):
    """Kernel double integral of phi(E) K(E, E') psi(E').

    The log-singular part is reduced to the outer integral of psi * F_phi;
    the remaining kernel pieces are smooth or rank one.  Combinations are
    expanded term by term so the result is bilinear up to rounding.
    """
    from .testfn import LinearCombination
    for a, b in ((phi, psi), (psi, phi)):
        if isinstance(a, LinearCombination):
            parts = [c * V_quadrature(spec, fn, b) for c, fn in a.terms]
            return math.fsum(parts)
    x, w = _outer_rule(phi, psi)
    log_part = -float(np.sum(w * psi(x) * phi.F(x)))
    if spec.kind == "log":
        m_phi = phi.integrate(lambda E: 2.0 - E * E)
        m_psi = psi.integrate(lambda E: 2.0 - E * E)
        return log_part + spec.s4 / 8.0 * m_phi * m_psi
    xe, we = phi.rule()
    ye, wy = psi.rule()
    root = np.sqrt(4.0 - xe * xe)[:, None] * np.sqrt(4.0 - ye * ye)[None, :]
    smooth_kernel = np.log((4.0 - xe[:, None] * ye[None, :] + root) / 2.0)
    smooth = float((we * phi(xe)) @ smooth_kernel @ (wy * psi(ye)))
    m_phi = phi.integrate(lambda E: E * np.sqrt(4.0 - E * E))
    m_psi = psi.integrate(lambda E: E * np.sqrt(4.0 - E * E))
    return (log_part + smooth + spec.s4 / 8.0 * m_phi * m_psi) / math.pi ** 2


# -- classical series ----------------------------------------------------------

def log_series_partial(alpha, theta, n_max):
    """-2 sum_{k<=n_max} cos(k alpha) cos(k theta) / k."""
    if not 0.0 < alpha < math.pi:
        raise ValueError("alpha must lie in (0, pi)")
    if math.isclose(math.cos(alpha), math.cos(theta), rel_tol=0.0, abs_tol=1e-15):
        raise ValueError("theta = +-alpha is excluded")
    k = np.arange(1, n_max + 1, dtype=float)
    return -2.0 * fsum_terms(np.cos(k * alpha) * np.cos(k * theta) / k)


def log_series_exact(alpha, theta):
    return math.log(abs(2.0 * math.cos(alpha) - 2.0 * math.cos(theta)))


def sine_series_partial(alpha, beta, n_max):
    """2 sum_{k<=n_max} sin(k alpha) sin(k beta) / k."""
    for v in (alpha, beta):
        if not 0.0 < v < math.pi:
            raise ValueError("angles must lie in (0, pi)")
    if alpha == beta:
        raise ValueError("alpha = beta is excluded")
    k = np.arange(1, n_max + 1, dtype=float)
    return 2.0 * fsum_terms(np.sin(k * alpha) * np.sin(k * beta) / k)


def sine_series_exact(alpha, beta):
    return math.log(abs(math.sin((alpha + beta) / 2.0) / math.sin((alpha - beta) / 2.0)))


def arcsine_coeff(F, n, n_quad=DEFAULT_N_QUAD):
    """(1/pi) int_{-2}^{2} F(l) T_n(l/2) / sqrt(4 - l^2) dl.

    With l = 2 cos t this is (1/pi) int_0^pi F(2 cos t) cos(n t) dt,
    i.e. half the Chebyshev coefficient c_n(F).
    """
    n_arr = np.atleast_1d(np.asarray(n))
    if np.any(n_arr < 1):
        raise ValueError("n must be positive")
    c = cheb_coeffs(F, int(n_arr.max()), n_quad).values
    out = 0.5 * c[n_arr - 1]
    return out if np.ndim(n) else float(out[0])


# -- limiting field ------------------------------------------------------------

def limit_field_weights(s4, n_max):
    """sqrt(2/n) for every mode except n = 2, which carries sqrt(1 + s4/2)."""
    if not s4 >= -2.0:
        raise ValueError("s4 must be >= -2")
    if n_max < 2:
        raise ValueError("n_max must be at least 2")
    n = np.arange(1, n_max + 1)
    w = np.sqrt(2.0 / n)
    w[1] = math.sqrt(1.0 + s4 / 2.0)
    return w


@dataclass(frozen=True)
class LimitFieldSample:
    coefficients: np.ndarray
    s4: float
    n_max: int

    @property
    def weights(self):
        return limit_field_weights(self.s4, self.n_max)


def synthesize_limit_field(s4, n_max, stream):
    limit_field_weights(s4, n_max)
    a = stream.generator().standard_normal(n_max)
    return LimitFieldSample(a, float(s4), int(n_max))


def pair(sample, phi):
    """sum_n weight_n a_n d_n(phi)."""
    d = phi.cos_moments(sample.n_max)
    return fsum_terms(sample.weights * sample.coefficients * d)


def synth_pairings(functions, s4, n_max, replicas, master_seed, threads=None):
    """Pairings of `replicas` limiting-field samples with each test function.

    Sample i uses stream (master_seed, i); returns a (replicas, len(functions))
    array.
    """
    w = limit_field_weights(s4, n_max)
    D = np.column_stack([fn.cos_moments(n_max) for fn in functions]) * w[:, None]

    def one(i):
        a = RngStream(master_seed, i).generator().standard_normal(n_max)
        return a @ D

    return np.vstack(map_replicas(one, replicas, threads))
