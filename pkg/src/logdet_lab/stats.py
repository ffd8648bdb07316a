"""Estimators and diagnostics for Monte Carlo pairings."""

import math
from dataclasses import asdict, dataclass

import numpy as np
import scipy.stats

MIN_NORMALITY_SAMPLES = 500


def unbiased_cov(xs, ys):
    """Unbiased sample covariance and its delta-method standard error.

    The standard error uses the sample fourth cross moment,
    ``se^2 = (mean(dx^2 dy^2) - cov^2) / M``.
    """
    x = np.asarray(xs, dtype=float)
    y = np.asarray(ys, dtype=float)
    if x.shape != y.shape or x.ndim != 1:
        raise ValueError("xs and ys must be 1-d arrays of equal length")
    M = x.size
    if M < 2:
        raise ValueError("need at least two samples")
    dx = x - x.mean()
    dy = y - y.mean()
    cov = float(dx @ dy) / (M - 1)
    m22 = float(np.mean(dx * dx * dy * dy))
    se = math.sqrt(max(m22 - cov * cov, 0.0) / M)
    return cov, se


def covariance_matrix(X):
    """Unbiased covariance matrix of the columns of X with elementwise SEs."""
    X = np.asarray(X, dtype=float)
    M, F = X.shape
    if M < 2:
        raise ValueError("need at least two rows")
    D = X - X.mean(axis=0)
    cov = D.T @ D / (M - 1)
    m22 = (D * D).T @ (D * D) / M
    se = np.sqrt(np.maximum(m22 - cov * cov, 0.0) / M)
    return cov, se


@dataclass
class NormalityReport:
    sample_size: int
    variance_theory: float
    skewness: float
    excess_kurtosis: float
    ks_distance: float
    ks_pvalue: float
    kurtosis_threshold: float
    ks_threshold: float
    degenerate: bool
    passed: bool

    def to_dict(self):
        return asdict(self)


def normality_test(xs, variance_theory):
    """Compare a centered sample with N(0, variance_theory).

    Passes when |excess kurtosis| <= 5 sqrt(24/M) and the Kolmogorov
    distance to the fully specified normal law is <= 1.63/sqrt(M).  A
    sample with zero spread is reported as degenerate and never passes.
    """
    if not variance_theory > 0:
        raise ValueError("theoretical variance must be positive")
    x = np.asarray(xs, dtype=float)
    M = x.size
    if M < MIN_NORMALITY_SAMPLES:
        raise ValueError(f"normality test needs at least {MIN_NORMALITY_SAMPLES} samples")
    kurt_tol = 5.0 * math.sqrt(24.0 / M)
    ks_tol = 1.63 / math.sqrt(M)
    if np.ptp(x) == 0:
        return NormalityReport(M, variance_theory, math.nan, math.nan, 1.0, 0.0,
                               kurt_tol, ks_tol, True, False)
    skew = float(scipy.stats.skew(x))
    kurt = float(scipy.stats.kurtosis(x, fisher=True))
    ks = scipy.stats.kstest(x / math.sqrt(variance_theory), "norm")
    passed = abs(kurt) <= kurt_tol and ks.statistic <= ks_tol
    return NormalityReport(M, float(variance_theory), skew, kurt, float(ks.statistic),
                           float(ks.pvalue), kurt_tol, ks_tol, False, bool(passed))


@dataclass
class PowerLawFit:
    slope: float
    intercept: float
    stderr: float


def powerlaw_fit(ks, vars):
    """Least-squares line through (log k, log var)."""
    k = np.asarray(ks, dtype=float)
    v = np.asarray(vars, dtype=float)
    if k.shape != v.shape or k.size < 2:
        raise ValueError("need at least two (k, var) points of matching shape")
    if np.any(k <= 0) or np.any(v <= 0):
        raise ValueError("powerlaw_fit needs strictly positive inputs")
    if np.unique(k).size < 2:
        raise ValueError("need at least two distinct k values")
    res = scipy.stats.linregress(np.log(k), np.log(v))
    stderr = float(res.stderr) if k.size > 2 else math.nan
    return PowerLawFit(float(res.slope), float(res.intercept), stderr)
