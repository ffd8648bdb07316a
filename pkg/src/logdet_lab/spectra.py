"""Eigenvalue spectra of real symmetric matrices and replica batches."""

import csv
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg
from threadpoolctl import threadpool_limits

from .ensemble import require_valid, sample_matrix
from .rng import RngStream

MAX_SWEEPS = 50


class EigensolverError(ArithmeticError):
    """The tridiagonal iteration did not converge."""

    def __init__(self, message, replica=None):
        super().__init__(message if replica is None else f"replica {replica}: {message}")
        self.replica = replica


@dataclass(frozen=True)
class Spectrum:
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.ndim != 1:
            raise ValueError("spectrum must be one-dimensional")
        if np.any(np.diff(v) < 0):
            raise ValueError("spectrum must be sorted ascending")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def n(self):
        return self.values.size

    def __len__(self):
        return self.values.size

    def __array__(self, dtype=None, copy=None):
        return self.values if dtype is None else self.values.astype(dtype)


def householder_tridiagonalize(A):
    """Reduce a symmetric matrix to tridiagonal form by Householder reflections.

    Returns the diagonal ``d`` and the subdiagonal ``e`` (length n-1) of a
    tridiagonal matrix orthogonally similar to `A`.
    """
    T = np.array(A, dtype=float)
    n = T.shape[0]
    for k in range(n - 2):
        x = T[k + 1:, k]
        alpha = -math.copysign(np.linalg.norm(x), x[0] if x[0] != 0 else 1.0)
        v = x.copy()
        v[0] -= alpha
        vnorm2 = v @ v
        if vnorm2 == 0.0:
            continue
        # Two-sided update T <- P T P with P = I - 2 v v^T / (v^T v).
        S = T[k + 1:, k:]
        S -= np.outer(v, (2.0 / vnorm2) * (v @ S))
        S = T[k:, k + 1:]
        S -= np.outer((2.0 / vnorm2) * (S @ v), v)
    return np.diag(T).copy(), np.diag(T, -1).copy()


def tridiagonal_eigenvalues(d, e, max_sweeps=MAX_SWEEPS):
    """Eigenvalues of a symmetric tridiagonal matrix by implicit QL with
    Wilkinson shifts, at most `max_sweeps` iterations per eigenvalue."""
    d = np.array(d, dtype=float)
    n = d.size
    e = np.append(np.array(e, dtype=float), 0.0)
    for l in range(n):
        it = 0
        while True:
            m = l
            while m < n - 1:
                dd = abs(d[m]) + abs(d[m + 1])
                if abs(e[m]) <= np.finfo(float).eps * dd:
                    break
                m += 1
            if m == l:
                break
            if it == max_sweeps:
                raise EigensolverError(f"no convergence after {max_sweeps} sweeps")
            it += 1
            g = (d[l + 1] - d[l]) / (2.0 * e[l])
            r = math.hypot(g, 1.0)
            g = d[m] - d[l] + e[l] / (g + math.copysign(r, g))
            s = c = 1.0
            p = 0.0
            i = m - 1
            while i >= l:
                f = s * e[i]
                b = c * e[i]
                r = math.hypot(f, g)
                e[i + 1] = r
                if r == 0.0:
                    d[i + 1] -= p
                    e[m] = 0.0
                    break
                s = f / r
                c = g / r
                g = d[i + 1] - p
                r = (d[i] - g) * s + 2.0 * c * b
                p = s * r
                d[i + 1] = g + p
                g = c * r - b
                i -= 1
            else:
                d[l] -= p
                e[l] = g
                e[m] = 0.0
    return np.sort(d)


def eigenvalues(matrix, method="lapack", replica=None):
    """Sorted eigenvalues of an exactly symmetric matrix (no eigenvectors).

    ``method="lapack"`` calls LAPACK ``dsyev`` (Householder reduction plus
    implicit QL/QR on the tridiagonal form); ``method="native"`` runs the
    same two stages in Python and is meant for small matrices.
    """
    A = np.asarray(matrix, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError("matrix must be square")
    if not np.array_equal(A, A.T):
        raise ValueError("matrix must be exactly symmetric")
    if method == "native":
        try:
            vals = tridiagonal_eigenvalues(*householder_tridiagonalize(A))
        except EigensolverError as exc:
            raise EigensolverError(str(exc), replica) from None
    elif method == "lapack":
        try:
            vals = scipy.linalg.eigh(A, eigvals_only=True, driver="ev",
                                     overwrite_a=False, check_finite=True)
        except (np.linalg.LinAlgError, ValueError) as exc:
            raise EigensolverError(str(exc), replica) from None
    else:
        raise ValueError(f"unknown method {method!r}")
    return Spectrum(np.sort(vals))


def resolve_threads(threads=None):
    """Worker count from the argument, else LOGDET_LAB_THREADS, else 1."""
    if threads is None:
        threads = int(os.environ.get("LOGDET_LAB_THREADS", "1"))
    if threads < 1:
        raise ValueError("thread count must be positive")
    return threads


def map_replicas(func, replicas, threads=None):
    """Evaluate ``func(i)`` for i in range(replicas), results ordered by i.

    BLAS is pinned to a single thread inside workers so that each
    replica's arithmetic is identical for every worker count.
    """
    threads = resolve_threads(threads)
    with threadpool_limits(limits=1):
        if threads == 1:
            return [func(i) for i in range(replicas)]
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(func, range(replicas)))


def replica_spectrum(spec, master_seed, index, method="lapack"):
    H = sample_matrix(spec, RngStream(master_seed, index))
    return eigenvalues(H, method=method, replica=index)


@dataclass
class BatchResult:
    spec: object
    master_seed: int
    spectra: np.ndarray
    seeds: list = field(default_factory=list)
    wall_time: float = 0.0
    threads: int = 1

    @property
    def replicas(self):
        return self.spectra.shape[0]

    def spectrum(self, i):
        return Spectrum(self.spectra[i])


def run_batch(spec, replicas, master_seed, threads=None, method="lapack"):
    """Spectra of `replicas` independent matrices; row i uses stream (seed, i)."""
    if replicas < 1:
        raise ValueError("need at least one replica")
    require_valid(spec)
    t0 = time.perf_counter()
    rows = map_replicas(lambda i: replica_spectrum(spec, master_seed, i, method).values,
                        replicas, threads)
    return BatchResult(
        spec=spec,
        master_seed=master_seed,
        spectra=np.vstack(rows),
        seeds=[(master_seed, i) for i in range(replicas)],
        wall_time=time.perf_counter() - t0,
        threads=resolve_threads(threads),
    )


def write_spectra_csv(batch, path):
    """Dump a batch as CSV rows (replica, index, lambda)."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["replica", "index", "lambda"])
        for r, row in enumerate(batch.spectra):
            for j, lam in enumerate(row):
                w.writerow([r, j, format(float(lam), ".17g")])


def semicircle_cdf(x):
    """Distribution function of the semicircle law on [-2, 2]."""
    x = np.clip(np.asarray(x, dtype=float), -2.0, 2.0)
    return 0.5 + (x * np.sqrt(4.0 - x * x) / 2.0 + 2.0 * np.arcsin(x / 2.0)) / (2.0 * np.pi)
