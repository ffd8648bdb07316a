"""Interval, Dirichlet modes, smooth bumps and their log/step transforms.

For a test function phi on I = [a, b]:

* ``F(x) = int_I phi(E) log|E - x| dE``, the log potential;
* ``G(x) = int_x^inf phi(E) dE``, the right-tail integral;
* ``d_n = int_I phi(E) T_n(E/2) dE``, the Chebyshev pairings.

F is computed by singularity subtraction: the constant phi(x) is taken out
and integrated exactly against log|E - x|, the remainder is integrated on
panels split at x and graded geometrically toward it.  Points farther
than one panel width from the support use a fixed composite rule.
"""

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.special import sici

from .quadrature import QuadratureRule, composite_rule, gauss_legendre, log_integral

EULER_GAMMA = 0.57721566490153286061
_CHUNK = 4096


@dataclass(frozen=True)
class Interval:
    a: float
    b: float

    def __post_init__(self):
        if not -2.0 < self.a < self.b < 2.0:
            raise ValueError(f"interval [{self.a}, {self.b}] must satisfy -2 < a < b < 2")

    @property
    def L(self):
        return self.b - self.a

    def contains(self, x):
        return (x >= self.a) & (x <= self.b)


def _flat(x):
    arr = np.asarray(x, dtype=float)
    return arr, arr.ravel()


class TestFunction:
    """Base class; subclasses define `interval`, `support`, `_eval` and
    `base_panels`."""

    __test__ = False  # keep pytest from collecting this class
    base_panels = 8
    order = 32

    # -- evaluation -------------------------------------------------------

    def __call__(self, E):
        E, flat = _flat(E)
        out = np.zeros_like(flat)
        s0, s1 = self.support
        inside = (flat >= s0) & (flat <= s1)
        out[inside] = self._eval(flat[inside])
        return out.reshape(E.shape) if E.ndim else float(out[0])

    def rule(self, extra_panels=0):
        """Composite Gauss-Legendre nodes and weights on the support."""
        s0, s1 = self.support
        return composite_rule(np.linspace(s0, s1, self.base_panels + extra_panels + 1), self.order)

    def integrate(self, g, extra_panels=0):
        """Integral of phi(E) * g(E) over the support; `g` is vectorized."""
        nodes, w = self.rule(extra_panels)
        return float(np.sum(w * self._eval(nodes) * g(nodes)))

    @cached_property
    def total(self):
        return self.integrate(np.ones_like)

    # -- transforms -------------------------------------------------------

    @cached_property
    def _far_rule(self):
        nodes, w = self.rule()
        return nodes, w * self._eval(nodes)

    @cached_property
    def _near_rule(self):
        return QuadratureRule(order=self.order, panels=self.base_panels).unit_graded()

    def F(self, x):
        """Log potential int phi(E) log|E - x| dE."""
        return self.F_quadrature(x)

    def F_quadrature(self, x):
        x, flat = _flat(x)
        out = np.empty_like(flat)
        s0, s1 = self.support
        delta = (s1 - s0) / self.base_panels
        near = (flat > s0 - delta) & (flat < s1 + delta)
        far_idx = np.flatnonzero(~near)
        near_idx = np.flatnonzero(near)
        nodes, wphi = self._far_rule
        for lo in range(0, far_idx.size, _CHUNK):
            idx = far_idx[lo:lo + _CHUNK]
            out[idx] = np.log(np.abs(flat[idx, None] - nodes)) @ wphi
        for lo in range(0, near_idx.size, _CHUNK // 4):
            idx = near_idx[lo:lo + _CHUNK // 4]
            out[idx] = self._F_near(flat[idx])
        return out.reshape(x.shape) if x.ndim else float(out[0])

    def _F_near(self, x):
        s0, s1 = self.support
        u, wu = self._near_rule
        xc = np.clip(x, s0, s1)
        fx = self(x)
        total = fx * log_integral(s0, s1, x)
        for sign, length in ((-1.0, xc - s0), (1.0, s1 - xc)):
            E = xc[:, None] + sign * length[:, None] * u
            w = length[:, None] * wu
            gap = E - x[:, None]
            with np.errstate(divide="ignore", invalid="ignore"):
                integrand = (self(E) - fx[:, None]) * np.log(np.abs(gap))
            # nodes that round onto x carry phi(E) - phi(x) = 0
            total = total + np.sum(np.where((w > 0) & (gap != 0), w * integrand, 0.0), axis=1)
        return total

    @cached_property
    def _tail_table(self):
        s0, s1 = self.support
        br = np.linspace(s0, s1, self.base_panels + 1)
        nodes, w = composite_rule(br, self.order)
        per_panel = (w * self._eval(nodes)).reshape(self.base_panels, self.order).sum(axis=1)
        cum = np.concatenate((np.cumsum(per_panel[::-1])[::-1], [0.0]))
        return br, cum

    def G(self, x):
        """Right-tail integral int_x^inf phi(E) dE."""
        return self.G_quadrature(x)

    def G_quadrature(self, x):
        x, flat = _flat(x)
        s0, s1 = self.support
        br, cum = self._tail_table
        out = np.where(flat <= s0, cum[0], 0.0)
        inside = np.flatnonzero((flat > s0) & (flat < s1))
        if inside.size:
            xi = flat[inside]
            panel = np.clip(np.searchsorted(br, xi, side="right") - 1, 0, self.base_panels - 1)
            right = br[panel + 1]
            t, wt = gauss_legendre(self.order)
            half = 0.5 * (right - xi)
            E = xi[:, None] + half[:, None] * (t + 1.0)
            out[inside] = cum[panel + 1] + np.sum(half[:, None] * wt * self(E), axis=1)
        return out.reshape(x.shape) if x.ndim else float(out[0])

    # -- Chebyshev pairings -------------------------------------------------

    def _angle_rule(self, n_max):
        s0, s1 = self.support
        extra = int(math.ceil(n_max * (s1 - s0) / 8.0))
        nodes, w = self.rule(extra)
        return np.arccos(nodes / 2.0), w * self._eval(nodes)

    def cos_moments(self, n_max):
        """d_n = int phi(E) T_n(E/2) dE for n = 1..n_max."""
        alpha, w = self._angle_rule(n_max)
        n = np.arange(1, n_max + 1)
        return np.cos(n[:, None] * alpha) @ w

    def sin_moments(self, n_max):
        """int phi(E) sin(n arccos(E/2)) dE for n = 1..n_max."""
        alpha, w = self._angle_rule(n_max)
        n = np.arange(1, n_max + 1)
        return np.sin(n[:, None] * alpha) @ w

    # -- algebra ------------------------------------------------------------

    def __add__(self, other):
        return LinearCombination.of((1.0, self), (1.0, other))

    def __sub__(self, other):
        return LinearCombination.of((1.0, self), (-1.0, other))

    def __mul__(self, c):
        return LinearCombination.of((float(c), self))

    __rmul__ = __mul__

    def __neg__(self):
        return self * -1.0


@dataclass(frozen=True, eq=True)
class DirichletMode(TestFunction):
    """e_k(E) = sqrt(2/L) sin(pi k (E - a) / L) on I, zero elsewhere."""

    k: int
    interval: Interval

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("Dirichlet mode index must be positive")

    @property
    def support(self):
        return self.interval.a, self.interval.b

    @property
    def base_panels(self):
        return 4 + self.k

    @property
    def mu(self):
        return (math.pi * self.k / self.interval.L) ** 2

    @property
    def omega(self):
        return math.pi * self.k / self.interval.L

    def _eval(self, E):
        I = self.interval
        return math.sqrt(2.0 / I.L) * np.sin(self.omega * (E - I.a))

    @cached_property
    def total(self):
        L, k = self.interval.L, self.k
        return math.sqrt(2.0 / L) * (L / (math.pi * k)) * (1 - (-1) ** k)

    def G(self, x):
        x, flat = _flat(x)
        I, k = self.interval, self.k
        c = math.sqrt(2.0 / I.L) * I.L / (math.pi * k)
        mid = c * (np.cos(self.omega * (np.clip(flat, I.a, I.b) - I.a)) - (-1) ** k)
        out = np.where(flat <= I.a, self.total, np.where(flat >= I.b, 0.0, mid))
        return out.reshape(x.shape) if x.ndim else float(out[0])

    def F(self, x):
        """Closed form through the sine and cosine integrals."""
        x, flat = _flat(x)
        I, w = self.interval, self.omega
        c = w * (flat - I.a)
        sin_part = _sin_log_primitive(w, I.b - flat) - _sin_log_primitive(w, I.a - flat)
        cos_part = _cos_log_primitive(w, I.b - flat) - _cos_log_primitive(w, I.a - flat)
        out = math.sqrt(2.0 / I.L) * (np.cos(c) * sin_part + np.sin(c) * cos_part)
        return out.reshape(x.shape) if x.ndim else float(out[0])

    def to_dict(self):
        return {"type": "dirichlet", "k": self.k}

    @property
    def name(self):
        return f"e{self.k}"


def _sin_log_primitive(w, t):
    """Antiderivative of sin(w t) log|t| that is continuous at t = 0."""
    at = np.abs(t)
    with np.errstate(divide="ignore", invalid="ignore"):
        _, ci = sici(w * at)
        val = (ci - np.cos(w * t) * np.log(at)) / w
    return np.where(at == 0.0, (EULER_GAMMA + math.log(w)) / w, val)


def _cos_log_primitive(w, t):
    """Antiderivative of cos(w t) log|t|, vanishing at t = 0."""
    at = np.abs(t)
    with np.errstate(divide="ignore", invalid="ignore"):
        si, _ = sici(w * t)
        val = (np.sin(w * t) * np.log(at) - si) / w
    return np.where(at == 0.0, 0.0, val)


def _bump_mass():
    x, w = composite_rule(np.linspace(-1.0, 1.0, 9), 32)
    return float(np.sum(w * np.exp(-1.0 / (1.0 - x * x))))


BUMP_MASS = _bump_mass()


@dataclass(frozen=True, eq=True)
class SmoothBump(TestFunction):
    """Mollifier exp(-1/(1 - t^2)), t = (E - center)/halfwidth, with unit mass."""

    center: float
    halfwidth: float
    interval: Interval

    def __post_init__(self):
        if not self.halfwidth > 0:
            raise ValueError("halfwidth must be positive")
        s0, s1 = self.support
        if not (self.interval.a < s0 and s1 < self.interval.b):
            raise ValueError("bump support must lie strictly inside the interval")

    @property
    def support(self):
        return self.center - self.halfwidth, self.center + self.halfwidth

    @property
    def peak(self):
        return math.exp(-1.0) / (BUMP_MASS * self.halfwidth)

    def _eval(self, E):
        t = (E - self.center) / self.halfwidth
        gap = 1.0 - t * t
        with np.errstate(divide="ignore", over="ignore"):
            val = np.exp(-1.0 / gap)
        return np.where(gap > 0, val, 0.0) / (BUMP_MASS * self.halfwidth)

    @cached_property
    def total(self):
        return 1.0

    def to_dict(self):
        return {"type": "bump", "center": self.center, "halfwidth": self.halfwidth}

    @property
    def name(self):
        return f"bump({self.center:g},{self.halfwidth:g})"


@dataclass(frozen=True, eq=True)
class LinearCombination(TestFunction):
    """Finite linear combination sum_i c_i phi_i over one interval."""

    terms: tuple

    @classmethod
    def of(cls, *pairs):
        flat = []
        for c, fn in pairs:
            if isinstance(fn, LinearCombination):
                flat.extend((c * ci, fi) for ci, fi in fn.terms)
            else:
                flat.append((float(c), fn))
        if not flat:
            raise ValueError("empty combination")
        if len({fn.interval for _, fn in flat}) != 1:
            raise ValueError("all terms must share one interval")
        return cls(tuple(flat))

    @property
    def interval(self):
        return self.terms[0][1].interval

    @property
    def support(self):
        return (min(fn.support[0] for _, fn in self.terms),
                max(fn.support[1] for _, fn in self.terms))

    @property
    def base_panels(self):
        return max(fn.base_panels for _, fn in self.terms)

    def _eval(self, E):
        return sum(c * fn(E) for c, fn in self.terms)

    def _combine(self, method, x):
        return sum(c * getattr(fn, method)(x) for c, fn in self.terms)

    def F(self, x):
        return self._combine("F", x)

    def G(self, x):
        return self._combine("G", x)

    def cos_moments(self, n_max):
        return self._combine("cos_moments", n_max)

    def sin_moments(self, n_max):
        return self._combine("sin_moments", n_max)

    @cached_property
    def total(self):
        return sum(c * fn.total for c, fn in self.terms)

    def to_dict(self):
        return {"type": "combination", "terms": [[c, fn.to_dict()] for c, fn in self.terms]}

    @property
    def name(self):
        return " + ".join(f"{c:g}*{fn.name}" for c, fn in self.terms)


def evaluate(phi, E):
    return phi(E)


def F_transform(phi, x):
    return phi.F(x)


def G_transform(phi, x):
    return phi.G(x)


def d_coeff(phi, n):
    """int_I phi(E) T_n(E/2) dE for a positive integer n (or array of them)."""
    n_arr = np.atleast_1d(np.asarray(n))
    if np.any(n_arr < 1):
        raise ValueError("n must be positive")
    vals = phi.cos_moments(int(n_arr.max()))[n_arr - 1]
    return vals if np.ndim(n) else float(vals[0])


def dirichlet_modes(K, interval):
    return [DirichletMode(k, interval) for k in range(1, K + 1)]


def from_config(entry, interval):
    """Build a test function from its JSON description."""
    kind = entry.get("type")
    if kind == "dirichlet":
        return DirichletMode(int(entry["k"]), interval)
    if kind == "bump":
        return SmoothBump(float(entry["center"]), float(entry["halfwidth"]), interval)
    if kind == "combination":
        return LinearCombination.of(*((float(c), from_config(e, interval)) for c, e in entry["terms"]))
    raise ValueError(f"unknown test function type {kind!r}")
