"""Random fields built from spectra: pairings, covariances, Sobolev norms.

The log field paired with phi is the trace statistic sum_i F_phi(lambda_i);
the counting field paired with phi is sum_i G_phi(lambda_i).  Tables hold
the uncentered sums; centering happens in the estimators through sample
means.
"""

import math
from dataclasses import dataclass, field, replace

import numpy as np

from . import theory
from .ensemble import require_valid
from .spectra import map_replicas, replica_spectrum
from .stats import covariance_matrix, powerlaw_fit, unbiased_cov
from .testfn import DirichletMode

FIELDS = ("log", "cnt")
DIAGNOSTICS = ("tr_h", "tr_h2")


def pair_log_raw(spectrum, phi):
    """sum_i F_phi(lambda_i)."""
    return float(np.sum(phi.F(np.asarray(spectrum, dtype=float))))


def pair_cnt_raw(spectrum, phi):
    """sum_i G_phi(lambda_i)."""
    return float(np.sum(phi.G(np.asarray(spectrum, dtype=float))))


@dataclass
class PairingTable:
    functions: list
    log: np.ndarray
    cnt: np.ndarray
    diagnostics: dict = field(default_factory=dict)
    spec: object = None
    master_seed: int = None

    @property
    def replicas(self):
        return self.log.shape[0]

    @property
    def s4(self):
        return 0.0 if self.spec is None else self.spec.s4

    def values(self, name):
        if name in FIELDS:
            return getattr(self, name)
        return self.diagnostics[name]

    def subset(self, columns=None, replicas=None):
        """View restricted to some test functions and/or the first `replicas` rows."""
        cols = list(range(len(self.functions))) if columns is None else list(columns)
        rows = slice(None) if replicas is None else slice(0, int(replicas))
        return replace(self, functions=[self.functions[j] for j in cols],
                       log=self.log[rows][:, cols], cnt=self.cnt[rows][:, cols],
                       diagnostics={k: v[rows] for k, v in self.diagnostics.items()})


def _replica_row(spec, functions, master_seed, i, method):
    lam = replica_spectrum(spec, master_seed, i, method).values
    row = [pair_log_raw(lam, fn) for fn in functions]
    row += [pair_cnt_raw(lam, fn) for fn in functions]
    row += [float(np.sum(lam)), float(np.sum(lam * lam))]
    return np.array(row)


def run_experiment(spec, functions, replicas, master_seed, threads=None, method="lapack"):
    """Monte Carlo pairing table; row i depends only on (spec, seed, i).

    Spectra are consumed replica by replica and not retained.
    """
    if replicas < 2:
        raise ValueError("need at least two replicas")
    require_valid(spec)
    functions = list(functions)
    rows = map_replicas(lambda i: _replica_row(spec, functions, master_seed, i, method),
                        replicas, threads)
    data = np.vstack(rows)
    F = len(functions)
    return PairingTable(
        functions=functions,
        log=data[:, :F],
        cnt=data[:, F:2 * F],
        diagnostics={"tr_h": data[:, 2 * F], "tr_h2": data[:, 2 * F + 1]},
        spec=spec,
        master_seed=master_seed,
    )


def center(table):
    """Table with every column shifted to zero sample mean."""
    def c(a):
        return a - a.mean(axis=0)
    return replace(table, log=c(table.log), cnt=c(table.cnt),
                   diagnostics={k: c(v) for k, v in table.diagnostics.items()})


@dataclass
class CovarianceReport:
    field: str
    names: list
    replicas: int
    covariance: np.ndarray
    stderr: np.ndarray
    theory: np.ndarray
    s4: float

    @property
    def zscores(self):
        with np.errstate(divide="ignore", invalid="ignore"):
            return (self.covariance - self.theory) / self.stderr

    @property
    def correlation(self):
        sd = np.sqrt(np.diag(self.covariance))
        with np.errstate(divide="ignore", invalid="ignore"):
            return self.covariance / np.outer(sd, sd)

    def within(self, n_se=3.0):
        return np.abs(self.covariance - self.theory) <= n_se * self.stderr

    def to_dict(self):
        return {
            "field": self.field,
            "functions": self.names,
            "replicas": self.replicas,
            "s4": self.s4,
            "covariance": self.covariance.tolist(),
            "stderr": self.stderr.tolist(),
            "theory": self.theory.tolist(),
            "zscores": np.nan_to_num(self.zscores, nan=0.0, posinf=1e308, neginf=-1e308).tolist(),
            "within_3se": self.within(3.0).tolist(),
        }


def theory_matrix(kind, functions, s4, n_max=theory.DEFAULT_N_MAX):
    F = len(functions)
    out = np.empty((F, F))
    for i in range(F):
        for j in range(i, F):
            out[i, j] = out[j, i] = theory.V_series(kind, functions[i], functions[j], s4, n_max)
    return out


def center_and_covary(table, field="log", n_max=theory.DEFAULT_N_MAX, with_theory=True):
    """Empirical covariance of centered pairings next to V_log / V_cnt."""
    if table.replicas < 2:
        raise ValueError("covariance needs at least two replicas")
    cov, se = covariance_matrix(table.values(field))
    F = len(table.functions)
    th = (theory_matrix(field, table.functions, table.s4, n_max) if with_theory
          else np.full((F, F), np.nan))
    return CovarianceReport(field, [fn.name for fn in table.functions], table.replicas,
                            cov, se, th, table.s4)


def _dirichlet_columns(table, K_max):
    fns = table.functions
    if K_max is None:
        K_max = len(fns)
    if K_max < 1 or K_max > len(fns):
        raise ValueError("K_max exceeds the number of tabulated functions")
    interval = getattr(fns[0], "interval", None)
    for k, fn in enumerate(fns[:K_max], start=1):
        if not (isinstance(fn, DirichletMode) and fn.k == k and fn.interval == interval):
            raise ValueError(f"function {k - 1} is not the Dirichlet mode e_{k} on a common interval")
    return fns[:K_max], K_max


@dataclass
class SobolevEstimate:
    field: str
    r: float
    K_max: int
    per_replica: np.ndarray
    mean: float
    stderr: float
    tail_proxy: float

    def to_dict(self):
        return {"field": self.field, "r": self.r, "K_max": self.K_max, "mean": self.mean,
                "stderr": self.stderr, "tail_proxy": self.tail_proxy,
                "replicas": int(self.per_replica.size)}


def sobolev_norm_sq(table, r, K_max=None, field="log"):
    """Truncated H^{-r}(I) norm squared of the centered field, per replica.

    Per-replica values carry the factor M/(M-1) so that their mean is
    sum_k (1 + mu_k)^{-r} times the unbiased variance of <X, e_k>.
    """
    if not r > 0:
        raise ValueError("r must be positive")
    modes, K_max = _dirichlet_columns(table, K_max)
    M = table.replicas
    if M < 2:
        raise ValueError("need at least two replicas")
    X = table.values(field)[:, :K_max]
    D = X - X.mean(axis=0)
    weights = np.array([(1.0 + m.mu) ** (-r) for m in modes])
    per = (D * D) @ weights * (M / (M - 1))
    var_last = float(D[:, -1] @ D[:, -1]) / (M - 1)
    return SobolevEstimate(field, float(r), K_max, per, float(per.mean()),
                           float(per.std(ddof=1) / math.sqrt(M)),
                           float(weights[-1] * var_last * K_max))


@dataclass
class ScanResult:
    field: str
    ks: np.ndarray
    variances: np.ndarray
    stderrs: np.ndarray
    k_range: tuple
    slope: float
    intercept: float
    slope_stderr: float

    def rows(self):
        return [(int(k), float(v), float(s)) for k, v, s in zip(self.ks, self.variances, self.stderrs)]

    def to_dict(self):
        return {"field": self.field, "k_range": list(self.k_range), "slope": self.slope,
                "intercept": self.intercept, "slope_stderr": self.slope_stderr}


def variance_scan(table, field="log", k_range=(2, 32)):
    """Per-mode variances of <X, e_k> and the log-log slope over `k_range`."""
    modes, K = _dirichlet_columns(table, None)
    k_lo, k_hi = k_range
    if not 1 <= k_lo < k_hi <= K:
        raise ValueError(f"k range {k_range} needs two distinct modes within 1..{K}")
    X = table.values(field)
    stats = [unbiased_cov(X[:, j], X[:, j]) for j in range(K)]
    var = np.array([s[0] for s in stats])
    se = np.array([s[1] for s in stats])
    ks = np.arange(1, K + 1)
    sel = (ks >= k_lo) & (ks <= k_hi)
    fit = powerlaw_fit(ks[sel], var[sel])
    return ScanResult(field, ks, var, se, (k_lo, k_hi), fit.slope, fit.intercept, fit.stderr)


def synthetic_power_law_table(modes, replicas, master_seed, exponent=-1.0):
    """Table whose column k has unbiased sample variance exactly k**exponent.

    Every column is a rescaled copy of one standardized Gaussian vector;
    both fields receive the same data.
    """
    from .rng import RngStream
    z = RngStream(master_seed, 0).generator().standard_normal(replicas)
    z = (z - z.mean()) / z.std(ddof=1)
    ks = np.array([m.k for m in modes], dtype=float)
    X = z[:, None] * ks ** (exponent / 2.0)
    return PairingTable(functions=list(modes), log=X, cnt=X.copy(), master_seed=master_seed)
