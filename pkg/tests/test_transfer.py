import numpy as np
import pytest

from metarep.linalg import orthonormalize, principal_sin_theta
from metarep.model import DataSet, generate_task_data, make_rng, sample_features
from metarep.transfer import evaluate_transfer, fit_new_task, tilt_features

from conftest import random_rotation


def test_unreduced_regression_is_exact():
    rng = make_rng(0)
    alpha = rng.standard_normal(6)
    data = generate_task_data(np.eye(6), alpha, 20, rng, noise_std=0.0)
    np.testing.assert_allclose(fit_new_task(np.eye(6), data), alpha, atol=1e-8)


def test_null_response():
    data = DataSet(np.random.default_rng(0).standard_normal((10, 4)), np.zeros(10), np.zeros(10), 1)
    np.testing.assert_array_equal(fit_new_task(np.eye(4)[:, :2], data), np.zeros(2))


def _pinv_oracle(b_hat, data):
    x, y = data.covariates, data.responses
    gram = sum(b_hat.T @ np.outer(xi, xi) @ b_hat for xi in x)
    return np.linalg.pinv(gram) @ b_hat.T @ (x.T @ y)


@pytest.mark.parametrize("seed", range(5))
def test_matches_pseudoinverse_normal_equations(seed):
    rng = make_rng(seed)
    b = sample_features(12, 3, rng)
    b_hat = sample_features(12, 3, rng)
    data = generate_task_data(b, rng.standard_normal(3), 40, rng)
    np.testing.assert_allclose(fit_new_task(b_hat, data), _pinv_oracle(b_hat, data), atol=1e-8)


def test_fewer_samples_than_features():
    rng = make_rng(1)
    b = sample_features(12, 5, rng)
    data = generate_task_data(b, rng.standard_normal(5), 3, rng)
    np.testing.assert_allclose(fit_new_task(b, data), _pinv_oracle(b, data), atol=1e-8)


def test_rotation_of_features_keeps_beta():
    rng = make_rng(2)
    b = sample_features(10, 3, rng)
    data = generate_task_data(b, rng.standard_normal(3), 30, rng)
    q = random_rotation(np.random.default_rng(0), 3)
    a1 = fit_new_task(b, data)
    a2 = fit_new_task(b @ q, data)
    np.testing.assert_allclose(q @ a2, a1, atol=1e-10)
    np.testing.assert_allclose(b @ q @ a2, b @ a1, atol=1e-10)


def test_perfect_features_no_noise():
    rng = make_rng(3)
    b = sample_features(20, 4, rng)
    alpha = rng.standard_normal(4)
    fit = evaluate_transfer(b, alpha, b, generate_task_data(b, alpha, 6, rng, noise_std=0.0))
    assert fit.param_error_sq <= 1e-12
    np.testing.assert_allclose(fit.beta_hat, b @ fit.alpha_hat, atol=1e-12)


def test_orthogonal_features_bias():
    rng = make_rng(4)
    b = sample_features(20, 3, rng)
    g = rng.standard_normal((20, 3))
    perp = orthonormalize(g - b @ (b.T @ g))
    alpha = rng.standard_normal(3)
    small = evaluate_transfer(b, alpha, perp, generate_task_data(b, alpha, 30, rng, noise_std=0.0))
    # beta_hat lies in span(perp), orthogonal to beta
    assert small.param_error_sq == pytest.approx(alpha @ alpha + small.alpha_hat @ small.alpha_hat, rel=1e-12)
    large = evaluate_transfer(b, alpha, perp, generate_task_data(b, alpha, 200000, rng, noise_std=0.0))
    assert large.param_error_sq == pytest.approx(alpha @ alpha, rel=1e-3)


def test_tilt_features_angle():
    rng = make_rng(5)
    b = sample_features(30, 4, rng)
    for delta in (0.0, 0.1, 0.3, 0.6, 1.0):
        tilted = tilt_features(b, delta, rng)
        assert np.max(np.abs(tilted.T @ tilted - np.eye(4))) <= 1e-12
        assert principal_sin_theta(b, tilted) == pytest.approx(delta, abs=1e-12)
        np.testing.assert_allclose(np.linalg.svd(b.T @ tilted, compute_uv=False), np.sqrt(1 - delta**2), atol=1e-12)


def test_good_features_beat_baseline_when_data_scarce():
    meta, base = [], []
    for rep in range(30):
        rng = make_rng(77, rep)
        b = sample_features(100, 5, rng)
        alpha = rng.standard_normal(5) / np.sqrt(5)
        fit = evaluate_transfer(b, alpha, tilt_features(b, 0.2, rng), generate_task_data(b, alpha, 25, rng))
        meta.append(fit.param_error_sq)
        base.append(fit.baseline_error_sq)
    assert np.mean(meta) < np.mean(base)


def test_variance_term_matches_closed_form():
    # exact features: E||B alpha_hat - B alpha||^2 = r / (n2 - r - 1) for Gaussian designs
    d, r = 60, 4
    means = {}
    for n2 in (50, 100):
        errs = []
        for rep in range(2000):
            rng = make_rng(5150, n2, rep)
            b = sample_features(d, r, rng)
            alpha = rng.standard_normal(r) / np.sqrt(r)
            errs.append(evaluate_transfer(b, alpha, b, generate_task_data(b, alpha, n2, rng)).param_error_sq)
        means[n2] = np.mean(errs)
        assert means[n2] == pytest.approx(r / (n2 - r - 1), rel=0.06)
    assert means[50] / means[100] == pytest.approx((4 / 45) / (4 / 95), rel=0.08)
