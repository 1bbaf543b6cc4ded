"""Dense linear-algebra kernels.

Feature matrices are plain ``(d, r)`` float arrays with orthonormal columns.
Everything here is a pure function of its inputs.
"""

import numpy as np

from metarep.errors import DimensionMismatch, NotSymmetric, RankDeficient

# Relative singular-value cutoff below which a matrix counts as rank deficient.
RANK_RTOL = 1e-12
# Allowed asymmetry, max |S - S^T|, for inputs to the symmetric eigensolver.
SYMMETRY_ATOL = 1e-10
# Orthonormality tolerance on max |Q^T Q - I|.
ORTHO_ATOL = 1e-10


def _as_matrix(m, name="matrix"):
    m = np.asarray(m, dtype=float)
    if m.ndim == 1:
        m = m[:, None]
    if m.ndim != 2 or m.shape[0] < 1 or m.shape[1] < 1:
        raise DimensionMismatch(f"{name} must be a non-empty 2-D array, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError(f"{name} has non-finite entries")
    return m


def _fix_signs(vecs, tol=1e-12):
    """Flip columns so the first non-negligible coordinate of each is positive."""
    vecs = vecs.copy()
    for j in range(vecs.shape[1]):
        col = vecs[:, j]
        scale = np.max(np.abs(col))
        if scale == 0.0:
            continue
        first = np.flatnonzero(np.abs(col) > tol * scale)[0]
        if col[first] < 0:
            vecs[:, j] = -col
    return vecs


def is_orthonormal(basis, atol=ORTHO_ATOL):
    basis = np.asarray(basis, dtype=float)
    gram = basis.T @ basis
    return bool(np.max(np.abs(gram - np.eye(basis.shape[1]))) <= atol)


def orthonormalize(m):
    """Orthonormal basis for the column space of `m`.

    Uses a Householder QR with the diagonal of R forced positive, so the
    output is a deterministic function of `m`.

    Raises
    ------
    RankDeficient
        If ``sigma_min(m) <= RANK_RTOL * sigma_max(m)``.
    """
    m = _as_matrix(m)
    if m.shape[1] > m.shape[0]:
        raise RankDeficient(f"{m.shape[1]} columns cannot be independent in dimension {m.shape[0]}")
    sv = np.linalg.svd(m, compute_uv=False)
    if sv[0] == 0.0 or sv[-1] <= RANK_RTOL * sv[0]:
        raise RankDeficient(f"smallest singular value {sv[-1]:.3e} vs largest {sv[0]:.3e}")
    q, rr = np.linalg.qr(m)
    signs = np.sign(np.diag(rr))
    signs[signs == 0] = 1.0
    return q * signs


def top_r_eigs(s, r):
    """Top-`r` eigenpairs of a symmetric matrix.

    Returns
    -------
    vecs : ndarray, shape (d, r)
        Orthonormal eigenvectors, the first non-negligible coordinate of each
        made positive.
    vals : ndarray, shape (r,)
        Eigenvalues in descending order.
    """
    s = _as_matrix(s)
    d = s.shape[0]
    if s.shape[1] != d:
        raise DimensionMismatch(f"expected a square matrix, got shape {s.shape}")
    if not 1 <= r <= d:
        raise DimensionMismatch(f"r={r} must lie in [1, {d}]")
    if np.max(np.abs(s - s.T)) > SYMMETRY_ATOL:
        raise NotSymmetric(f"max asymmetry {np.max(np.abs(s - s.T)):.3e}")
    vals, vecs = np.linalg.eigh(0.5 * (s + s.T))
    order = np.argsort(-vals, kind="stable")[:r]
    return _fix_signs(vecs[:, order]), vals[order]


def principal_sin_theta(a, b):
    """Sine of the largest principal angle between span(a) and span(b).

    Both arguments must be orthonormal ``(d, r)`` bases of equal shape. The
    value is ``||(I - a a^T) b||_2``, which equals ``sqrt(1 - sigma_min(a^T b)^2)``
    but keeps full relative precision for nearly aligned subspaces.
    """
    a = _as_matrix(a, "a")
    b = _as_matrix(b, "b")
    if a.shape != b.shape:
        raise DimensionMismatch(f"shapes differ: {a.shape} vs {b.shape}")
    resid = b - a @ (a.T @ b)
    return float(min(1.0, np.linalg.norm(resid, 2)))


def least_squares(design, response):
    """Minimum-norm minimizer of ``||response - design @ w||^2``."""
    design = _as_matrix(design, "design")
    response = np.asarray(response, dtype=float).reshape(-1)
    if response.shape[0] != design.shape[0]:
        raise DimensionMismatch(f"design has {design.shape[0]} rows, response has {response.shape[0]}")
    w, *_ = np.linalg.lstsq(design, response, rcond=None)
    return w
