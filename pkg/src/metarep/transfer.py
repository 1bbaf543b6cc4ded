"""Fitting a new task through learned features, and the plain regression baseline."""

from dataclasses import dataclass

import numpy as np

from metarep.linalg import least_squares, orthonormalize


@dataclass(frozen=True)
class TransferFit:
    alpha_hat: np.ndarray  # (r,)
    beta_hat: np.ndarray  # (d,), learned_features @ alpha_hat
    param_error_sq: float
    baseline_error_sq: float


def fit_new_task(features, data):
    """Least-squares coefficients of the new task in the feature coordinates.

    Minimum-norm when ``X @ features`` is rank deficient (e.g. fewer samples
    than features).
    """
    return least_squares(data.covariates @ np.asarray(features, dtype=float), data.responses)


def evaluate_transfer(true_features, true_alpha, learned_features, new_data):
    """Squared parameter error of the feature-based fit and of full-dimension regression.

    Under identity covariance the squared parameter error equals the excess
    prediction risk on a fresh covariate.
    """
    learned = np.asarray(learned_features, dtype=float)
    beta = np.asarray(true_features, dtype=float) @ np.asarray(true_alpha, dtype=float)
    alpha_hat = fit_new_task(learned, new_data)
    beta_hat = learned @ alpha_hat
    beta_lr = least_squares(new_data.covariates, new_data.responses)
    return TransferFit(
        alpha_hat=alpha_hat,
        beta_hat=beta_hat,
        param_error_sq=float(np.sum((beta_hat - beta) ** 2)),
        baseline_error_sq=float(np.sum((beta_lr - beta) ** 2)),
    )


def tilt_features(features, sin_theta, rng):
    """A basis whose principal angles to `features` all have sine `sin_theta`.

    Each column is rotated toward its own direction in a random r-dimensional
    subspace of the orthogonal complement (needs ``d >= 2r``).
    """
    b = np.asarray(features, dtype=float)
    d, r = b.shape
    if 2 * r > d:
        raise ValueError(f"need d >= 2r to tilt, got d={d}, r={r}")
    if not 0.0 <= sin_theta <= 1.0:
        raise ValueError(f"sin_theta must lie in [0, 1], got {sin_theta}")
    g = rng.standard_normal((d, r))
    perp = orthonormalize(g - b @ (b.T @ g))
    cos = np.sqrt(1.0 - sin_theta**2)
    return cos * b + sin_theta * perp
