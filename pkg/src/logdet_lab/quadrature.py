"""Composite Gauss-Legendre rules, geometric grading and log-singular helpers."""

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

DEFAULT_ORDER = 32
GRADING_RATIO = 0.15
GRADING_LEVELS = 6


@lru_cache(maxsize=None)
def gauss_legendre(order):
    """Nodes and weights of the `order`-point Gauss-Legendre rule on [-1, 1]."""
    x, w = np.polynomial.legendre.leggauss(order)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def composite_rule(breakpoints, order=DEFAULT_ORDER):
    """Gauss-Legendre rule on each panel between consecutive breakpoints.

    Parameters
    ----------
    breakpoints : array_like
        Nondecreasing panel boundaries. Zero-length panels contribute
        nodes with zero weight.
    order : int
        Nodes per panel.

    Returns
    -------
    nodes, weights : ndarray
        Flattened arrays of length ``order * (len(breakpoints) - 1)``.
    """
    br = np.asarray(breakpoints, dtype=float)
    x, w = gauss_legendre(order)
    lo, hi = br[:-1, None], br[1:, None]
    half = 0.5 * (hi - lo)
    nodes = lo + half * (x + 1.0)
    weights = half * w
    return nodes.ravel(), weights.ravel()


def graded_unit_breakpoints(panels, levels=GRADING_LEVELS, ratio=GRADING_RATIO):
    """Breakpoints on [0, 1]: `panels` uniform panels, the first one graded
    geometrically toward 0 with `levels` extra cuts."""
    uniform = np.linspace(0.0, 1.0, panels + 1)
    graded = ratio ** np.arange(levels, 0, -1) / panels
    return np.concatenate(([0.0], graded, uniform[1:]))


def graded_breakpoints(a, b, panels, levels=GRADING_LEVELS, ratio=GRADING_RATIO):
    """Breakpoints on [a, b] graded toward both endpoints."""
    u = graded_unit_breakpoints(panels, levels, ratio)
    mid = 0.5 * (a + b)
    left = a + (mid - a) * u
    right = b - (b - mid) * u[::-1]
    return np.concatenate((left, right[1:]))


def log_primitive(t):
    """Antiderivative t*log|t| - t of log|t|, continuous at t = 0."""
    t = np.asarray(t, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = t * np.log(np.abs(t)) - t
    return np.where(t == 0.0, 0.0, out)


def log_integral(s0, s1, x):
    """Exact value of the integral of log|E - x| over E in [s0, s1]."""
    x = np.asarray(x, dtype=float)
    return log_primitive(s1 - x) - log_primitive(s0 - x)


@dataclass(frozen=True)
class QuadratureRule:
    """Composite Gauss-Legendre rule with a log-singular companion.

    ``order`` nodes on each of ``panels`` uniform panels for smooth
    integrands; near a log singularity the panel touching the singular
    point is graded geometrically with ``levels`` cuts of ratio ``ratio``.
    Polynomial exactness up to degree ``2*order - 1`` is checked on
    construction.
    """

    order: int = DEFAULT_ORDER
    panels: int = 8
    levels: int = GRADING_LEVELS
    ratio: float = GRADING_RATIO
    exactness_error: float = field(init=False, default=0.0)

    def __post_init__(self):
        if self.order < 1 or self.panels < 1:
            raise ValueError("order and panels must be positive")
        if not 0.0 < self.ratio < 1.0:
            raise ValueError("grading ratio must lie in (0, 1)")
        x, w = gauss_legendre(self.order)
        deg = np.arange(2 * self.order)
        exact = np.where(deg % 2 == 0, 2.0 / (deg + 1), 0.0)
        got = (x[None, :] ** deg[:, None]) @ w
        err = float(np.max(np.abs(got - exact)))
        if err > 1e-12:
            raise ArithmeticError(f"Gauss-Legendre rule of order {self.order} "
                                  f"fails polynomial exactness ({err:.2e})")
        object.__setattr__(self, "exactness_error", err)

    def smooth(self, a, b):
        """Nodes and weights for a smooth integrand on [a, b]."""
        return composite_rule(np.linspace(a, b, self.panels + 1), self.order)

    def endpoint_graded(self, a, b):
        """Nodes and weights on [a, b] graded toward both ends."""
        return composite_rule(
            graded_breakpoints(a, b, self.panels, self.levels, self.ratio), self.order)

    def unit_graded(self):
        """Nodes and weights on [0, 1] graded toward 0."""
        return composite_rule(
            graded_unit_breakpoints(self.panels, self.levels, self.ratio), self.order)
