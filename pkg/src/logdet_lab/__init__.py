"""Monte Carlo laboratory for the log-determinant and eigenvalue-counting
fields of real symmetric Wigner matrices."""

__version__ = "0.1.0"

from .ensemble import (EnsembleSpec, EntryDistribution, fourth_cumulant, gaussian_spec,
                       make_distribution, sample_matrix, validate_assumption)
from .rng import RngStream
from .spectra import Spectrum, eigenvalues, run_batch
from .testfn import (DirichletMode, Interval, LinearCombination, SmoothBump, F_transform,
                     G_transform, d_coeff, dirichlet_modes, evaluate)
from .fields import (center_and_covary, pair_cnt_raw, pair_log_raw, run_experiment,
                     sobolev_norm_sq, variance_scan)

__all__ = [
    "DirichletMode", "EnsembleSpec", "EntryDistribution", "F_transform", "G_transform",
    "Interval", "LinearCombination", "RngStream", "SmoothBump", "Spectrum", "center_and_covary",
    "d_coeff", "dirichlet_modes", "eigenvalues", "evaluate", "fourth_cumulant", "gaussian_spec",
    "make_distribution", "pair_cnt_raw", "pair_log_raw", "run_batch", "run_experiment",
    "sample_matrix", "sobolev_norm_sq", "validate_assumption", "variance_scan",
]
