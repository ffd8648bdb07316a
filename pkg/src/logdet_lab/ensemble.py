"""Entry laws and real symmetric Wigner matrices.

Three symmetric families are provided, each with closed-form cumulants:

``gaussian``
    sigma * Z.
``scale_mixture``
    Z * (sigma1 with probability p, else sigma2); fourth cumulant >= 0.
``rademacher_gauss``
    eps * a + sigma * Z with a fair sign eps; fourth cumulant -2 a**4 < 0.

All three have strictly positive smooth densities with Gaussian tails.
Parameters fix the *shape*; every law is rescaled on construction so that
its variance equals ``target_variance``.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .rng import RngStream

FAMILIES = ("gaussian", "scale_mixture", "rademacher_gauss")


class AssumptionError(ValueError):
    """An ensemble violates the moment/cumulant normalization."""


@dataclass(frozen=True)
class EntryDistribution:
    family: str
    params: dict
    target_variance: float
    scale: float = field(init=False)

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}; expected one of {FAMILIES}")
        if not self.target_variance > 0:
            raise ValueError("target_variance must be positive")
        raw = _raw_variance(self.family, self.params)
        object.__setattr__(self, "params", dict(self.params))
        object.__setattr__(self, "scale", math.sqrt(self.target_variance / raw))

    @property
    def mean(self):
        return 0.0

    @property
    def variance(self):
        return self.scale ** 2 * _raw_variance(self.family, self.params)

    def cumulant(self, k):
        """Closed-form cumulant of order k (k = 1..4)."""
        if k in (1, 3):
            return 0.0
        if k == 2:
            return self.variance
        if k == 4:
            return self.scale ** 4 * _raw_s4(self.family, self.params)
        raise ValueError("only cumulants of order 1..4 are available")

    @property
    def s4(self):
        return self.cumulant(4)

    def sample(self, gen, size):
        """Draw `size` variates from generator `gen` in a fixed draw order."""
        p = self.params
        if self.family == "gaussian":
            return self.scale * gen.standard_normal(size)
        if self.family == "scale_mixture":
            pick = gen.random(size) < p["p"]
            z = gen.standard_normal(size)
            return self.scale * np.where(pick, p["sigma1"], p["sigma2"]) * z
        signs = 2.0 * gen.integers(0, 2, size=size) - 1.0
        z = gen.standard_normal(size)
        return self.scale * (p["a"] * signs + p["sigma"] * z)

    def to_dict(self):
        return {"family": self.family, **self.params, "variance": self.target_variance}


def _raw_variance(family, params):
    if family == "gaussian":
        sigma = params.get("sigma", 1.0)
        if not sigma > 0:
            raise ValueError("gaussian sigma must be positive")
        return sigma ** 2
    if family == "scale_mixture":
        p, s1, s2 = params["p"], params["sigma1"], params["sigma2"]
        if not 0 < p < 1:
            raise ValueError("scale_mixture needs p in (0, 1)")
        if s1 == 0 and s2 == 0:
            raise ValueError("scale_mixture with sigma1 = sigma2 = 0 is degenerate")
        if not (s1 > 0 and s2 > 0):
            raise ValueError("scale_mixture needs sigma1 > 0 and sigma2 > 0 for a smooth density")
        return p * s1 ** 2 + (1 - p) * s2 ** 2
    a, sigma = params["a"], params["sigma"]
    if not a > 0:
        raise ValueError("rademacher_gauss needs a > 0")
    if not sigma > 0:
        raise ValueError("rademacher_gauss needs sigma > 0 (sigma = 0 is not smooth)")
    return a ** 2 + sigma ** 2


def _raw_s4(family, params):
    if family == "gaussian":
        return 0.0
    if family == "scale_mixture":
        p, v1, v2 = params["p"], params["sigma1"] ** 2, params["sigma2"] ** 2
        return 3.0 * (p * v1 ** 2 + (1 - p) * v2 ** 2 - (p * v1 + (1 - p) * v2) ** 2)
    return -2.0 * params["a"] ** 4


def make_distribution(family, params=None, target_variance=1.0):
    """Build an entry law of `family`, rescaled to `target_variance`."""
    return EntryDistribution(family, dict(params or {}), float(target_variance))


def fourth_cumulant(dist):
    return dist.s4


def unit_law_with_s4(family, s4, like=None):
    """A unit-variance law in `family` with fourth cumulant `s4`.

    `like` (an existing law of the same family) fixes the free shape
    parameter: the mixing weight p for scale mixtures.
    """
    if family == "gaussian":
        if s4 != 0:
            raise ValueError("gaussian laws have s4 = 0")
        return make_distribution("gaussian", {}, 1.0)
    if family == "rademacher_gauss":
        if not -2.0 < s4 < 0.0:
            raise ValueError("rademacher_gauss reaches s4 in (-2, 0) only")
        a2 = math.sqrt(-s4 / 2.0)
        return make_distribution("rademacher_gauss", {"a": math.sqrt(a2), "sigma": math.sqrt(1 - a2)})
    if family == "scale_mixture":
        p = like.params["p"] if like is not None else 0.5
        if not s4 > 0:
            raise ValueError("scale_mixture reaches s4 > 0 only")
        gap = math.sqrt(s4 / (3.0 * p * (1 - p)))
        v1, v2 = 1.0 + (1 - p) * gap, 1.0 - p * gap
        if not v2 > 0:
            raise ValueError(f"scale_mixture with p={p} cannot reach s4={s4}")
        return make_distribution("scale_mixture", {"p": p, "sigma1": math.sqrt(v1), "sigma2": math.sqrt(v2)})
    raise ValueError(f"unknown family {family!r}")


def matched_diagonal(offdiag):
    """Diagonal law sqrt(2) * xi, with xi unit-variance and s4(xi) = 2 s4(offdiag).

    Then s4(diag) = 4 s4(xi) = 8 s4(offdiag) and s3 vanishes on both
    sides, so s_k(diag) = 2**(k-1) s_k(offdiag) for k = 3, 4.
    """
    s4 = offdiag.s4 / offdiag.variance ** 2
    if offdiag.family == "gaussian" or s4 == 0:
        xi = make_distribution("gaussian", {}, 1.0)
    else:
        xi = unit_law_with_s4(offdiag.family, 2.0 * s4, like=offdiag)
    return make_distribution(xi.family, xi.params, 2.0)


@dataclass(frozen=True)
class EnsembleSpec:
    N: int
    offdiag: EntryDistribution
    diag: EntryDistribution

    def __post_init__(self):
        if self.N < 2:
            raise ValueError("matrix dimension must be at least 2")

    @classmethod
    def matched(cls, N, offdiag):
        """Ensemble whose diagonal law is derived from `offdiag`."""
        return cls(N, offdiag, matched_diagonal(offdiag))

    @property
    def s4(self):
        return self.offdiag.s4

    def to_dict(self):
        return {"N": self.N, "offdiag": self.offdiag.to_dict(), "diag": self.diag.to_dict()}


def gaussian_spec(N):
    """GOE normalization: off-diagonal variance 1/N, diagonal 2/N."""
    return EnsembleSpec.matched(N, make_distribution("gaussian", {}, 1.0))


def sample_matrix(spec, stream):
    """One N x N real symmetric Wigner matrix.

    Off-diagonal entries are drawn first, in row-major upper-triangle
    order, followed by the N diagonal entries; all are scaled by N**-1/2.
    """
    N = spec.N
    gen = stream.generator()
    off = spec.offdiag.sample(gen, N * (N - 1) // 2)
    dia = spec.diag.sample(gen, N)
    H = np.zeros((N, N))
    iu = np.triu_indices(N, 1)
    H[iu] = off
    H += H.T
    H[np.diag_indices(N)] = dia
    H *= 1.0 / math.sqrt(N)
    return H


@dataclass
class AssumptionReport:
    passed: bool
    residuals: dict
    failures: list

    def to_dict(self):
        return {"passed": self.passed, "residuals": self.residuals, "failures": self.failures}


def validate_assumption(spec, tol=1e-12):
    """Closed-form check of the entry normalization and cumulant relation.

    Never raises; returns an `AssumptionReport` listing any failures.
    """
    od, d = spec.offdiag, spec.diag
    res = {
        "offdiag_mean": od.mean,
        "diag_mean": d.mean,
        "offdiag_variance": od.variance - 1.0,
        "diag_variance": d.variance - 2.0,
        "cumulant_3": d.cumulant(3) - 4.0 * od.cumulant(3),
        "cumulant_4": d.cumulant(4) - 8.0 * od.cumulant(4),
    }
    messages = {
        "offdiag_mean": "off-diagonal mean != 0",
        "diag_mean": "diagonal mean != 0",
        "offdiag_variance": "off-diagonal variance != 1",
        "diag_variance": "diagonal variance != 2",
        "cumulant_3": "s_3(diag) != 4 s_3(offdiag)",
        "cumulant_4": "s_4(diag) != 8 s_4(offdiag)",
    }
    failures = [messages[k] for k, v in res.items() if not abs(v) <= tol * max(1.0, abs(od.s4))]
    if not od.s4 >= -2.0:
        failures.append("off-diagonal s_4 < -2 violates 1 + s_4/2 >= 0")
    return AssumptionReport(not failures, res, failures)


def require_valid(spec):
    report = validate_assumption(spec)
    if not report.passed:
        raise AssumptionError("; ".join(report.failures))
    return report


__all__ = [
    "FAMILIES", "AssumptionError", "AssumptionReport", "EntryDistribution", "EnsembleSpec",
    "RngStream", "fourth_cumulant", "gaussian_spec", "make_distribution", "matched_diagonal",
    "require_valid", "sample_matrix", "unit_law_with_s4", "validate_assumption",
]
