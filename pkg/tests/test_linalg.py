import numpy as np
import pytest
import scipy.linalg
from hypothesis import given, settings, strategies as st

from metarep.errors import DimensionMismatch, NotSymmetric, RankDeficient
from metarep.linalg import least_squares, orthonormalize, principal_sin_theta, top_r_eigs

from conftest import random_orthonormal, random_rotation


def test_orthonormalize_keeps_orthonormal_columns():
    m = np.eye(3)[:, :2]
    np.testing.assert_array_equal(orthonormalize(m), m)


def test_orthonormalize_single_column():
    q = orthonormalize(np.array([[3.0], [4.0]]))
    np.testing.assert_allclose(np.abs(q[:, 0]), [0.6, 0.8], atol=1e-15)


def test_orthonormalize_spans_input(rng):
    m = rng.standard_normal((6, 3))
    q = orthonormalize(m)
    assert np.linalg.norm(q @ q.T @ m - m) <= 1e-9
    assert np.max(np.abs(q.T @ q - np.eye(3))) <= 1e-10


@pytest.mark.parametrize("m", [np.zeros((4, 2)), np.array([[1.0, 2.0], [2.0, 4.0], [3.0, 6.0]]), np.ones((2, 3))])
def test_orthonormalize_rank_deficient(m):
    with pytest.raises(RankDeficient):
        orthonormalize(m)


def test_top_eig_diagonal():
    vecs, vals = top_r_eigs(np.diag([3.0, 2.0, 1.0]), 1)
    np.testing.assert_allclose(vecs[:, 0], [1, 0, 0])
    assert vals[0] == pytest.approx(3.0)


def test_top_eig_population_moment_shape():
    vecs, vals = top_r_eigs(np.diag([4.0, 2.0, 2.0]), 1)
    np.testing.assert_allclose(vecs[:, 0], [1, 0, 0])
    assert vals[0] == pytest.approx(4.0)


def _sym(rng, d):
    a = rng.standard_normal((d, d))
    return a + a.T


def test_top_eigs_match_full_spectrum_oracle(rng):
    s = _sym(rng, 8)
    vecs, vals = top_r_eigs(s, 3)
    # general (non-symmetric) solver as an independent route
    w, v = scipy.linalg.eig(s)
    order = np.argsort(-w.real)[:3]
    np.testing.assert_allclose(vals, w.real[order], atol=1e-8)
    for j, k in enumerate(order):
        ref = v[:, k].real / np.linalg.norm(v[:, k].real)
        assert abs(abs(ref @ vecs[:, j]) - 1.0) <= 1e-8
        assert np.linalg.norm(s @ vecs[:, j] - vals[j] * vecs[:, j]) <= 1e-8 * (1 + abs(vals[j]))


def test_top_eigs_sign_convention_and_order(rng):
    vecs, vals = top_r_eigs(_sym(rng, 6), 6)
    assert np.all(np.diff(vals) <= 0)
    for j in range(6):
        col = vecs[:, j]
        first = np.flatnonzero(np.abs(col) > 1e-12 * np.abs(col).max())[0]
        assert col[first] > 0


def test_top_eigs_reconstruction(rng):
    s = _sym(rng, 7)
    vecs, vals = top_r_eigs(s, 7)
    assert np.linalg.norm(vecs @ np.diag(vals) @ vecs.T - s) <= 1e-8


def test_top_eigs_errors():
    with pytest.raises(NotSymmetric):
        top_r_eigs(np.array([[1.0, 2.0], [0.0, 1.0]]), 1)
    with pytest.raises(DimensionMismatch):
        top_r_eigs(np.eye(3), 4)
    with pytest.raises(DimensionMismatch):
        top_r_eigs(np.ones((2, 3)), 1)


def test_sin_theta_examples():
    e = np.eye(2)
    assert principal_sin_theta(e[:, :1], e[:, :1]) == 0.0
    assert principal_sin_theta(e[:, :1], e[:, 1:]) == pytest.approx(1.0, abs=1e-15)
    phi = np.pi / 6
    b = np.array([[np.cos(phi)], [np.sin(phi)]])
    assert principal_sin_theta(e[:, :1], b) == pytest.approx(0.5, abs=1e-15)


def test_sin_theta_mismatch():
    with pytest.raises(DimensionMismatch):
        principal_sin_theta(np.eye(3)[:, :2], np.eye(3)[:, :1])


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), d=st.integers(1, 12), data=st.data())
def test_sin_theta_axioms(seed, d, data):
    r = data.draw(st.integers(1, d))
    rng = np.random.default_rng(seed)
    a, b = random_orthonormal(rng, d, r), random_orthonormal(rng, d, r)
    s = principal_sin_theta(a, b)
    assert 0.0 <= s <= 1.0
    assert principal_sin_theta(a, a) <= 1e-10
    assert abs(s - principal_sin_theta(b, a)) <= 1e-10
    assert abs(s - principal_sin_theta(a, b @ random_rotation(rng, r))) <= 1e-10


def test_sin_theta_matches_complement_form(rng):
    # ||a_perp^T b||_2 with the complement formed explicitly
    a, b = random_orthonormal(rng, 9, 3), random_orthonormal(rng, 9, 3)
    full, _ = np.linalg.qr(np.hstack([a, rng.standard_normal((9, 6))]))
    perp = full[:, 3:]
    assert principal_sin_theta(a, b) == pytest.approx(np.linalg.norm(perp.T @ b, 2), abs=1e-12)


def test_least_squares_examples():
    np.testing.assert_allclose(least_squares(np.eye(3), [1, 2, 3]), [1, 2, 3])
    np.testing.assert_allclose(least_squares(np.ones((2, 1)), [2, 4]), [3.0])


def test_least_squares_normal_equations_oracle(rng):
    x = rng.standard_normal((20, 4))
    y = rng.standard_normal(20)
    ref = np.linalg.solve(x.T @ x, x.T @ y)
    w = least_squares(x, y)
    np.testing.assert_allclose(w, ref, atol=1e-8)
    assert np.max(np.abs(x.T @ (y - x @ w))) <= 1e-8


def test_least_squares_min_norm_when_singular(rng):
    x = rng.standard_normal((3, 6))
    y = rng.standard_normal(3)
    w = least_squares(x, y)
    np.testing.assert_allclose(w, x.T @ np.linalg.solve(x @ x.T, y), atol=1e-10)
