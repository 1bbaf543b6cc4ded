"""Method-of-moments feature estimator.

The estimate of the shared subspace is the top-r eigenspace of
``(1/n) sum_i y_i^2 x_i x_i^T``, whose mean is
``2 B Lbar B^T + (1 + tr Lbar) I``.
"""

import warnings
from dataclasses import dataclass

import numpy as np

from metarep.errors import DimensionMismatch, SpectralGapWarning
from metarep.linalg import top_r_eigs

GAP_ATOL = 1e-12


@dataclass(frozen=True)
class MomEstimate:
    basis: np.ndarray  # (d, r)
    eigenvalues: np.ndarray  # top r+1 (or r when r == d), descending
    gap_warning: bool


def empirical_second_moment(data):
    """``(1/n) sum_i y_i^2 x_i x_i^T``, symmetrized."""
    x = data.covariates
    m = (x * data.responses[:, None] ** 2).T @ x / data.n
    return 0.5 * (m + m.T)


def population_moment(features, lambda_bar):
    """Expected moment ``2 B Lbar B^T + (1 + tr Lbar) I_d`` for orthonormal B."""
    b = np.asarray(features, dtype=float)
    lam = np.asarray(getattr(lambda_bar, "lambda_bar", lambda_bar), dtype=float)
    if lam.ndim != 2 or lam.shape != (b.shape[1], b.shape[1]):
        raise DimensionMismatch(f"Lbar {lam.shape} does not match features {b.shape}")
    m = 2.0 * b @ lam @ b.T + (1.0 + np.trace(lam)) * np.eye(b.shape[0])
    return 0.5 * (m + m.T)


def features_from_moment(moment, r):
    d = moment.shape[0]
    k = min(r + 1, d)
    vecs, vals = top_r_eigs(moment, k)
    gap = r < d and vals[r - 1] - vals[r] <= GAP_ATOL
    if gap:
        warnings.warn(
            f"eigenvalues {r} and {r + 1} coincide ({vals[r - 1]:.6g}); subspace is not unique",
            SpectralGapWarning,
            stacklevel=2,
        )
    return MomEstimate(vecs[:, :r], vals, bool(gap))


def mom_estimate(data, r):
    """Estimate the r-dimensional feature subspace from pooled multi-task data."""
    return features_from_moment(empirical_second_moment(data), r)
