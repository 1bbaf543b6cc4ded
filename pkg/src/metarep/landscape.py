"""Regularized Burer-Monteiro objective for multi-task feature learning.

The parameter matrix ``M = U V^T`` (``U`` is t x r, ``V`` is d x r) is fit by
minimizing::

    f(U, V) = (2t/n) sum_i (y_i - u_{t(i)}^T V^T x_i)^2 + 1/2 ||U^T U - V^T V||_F^2

and the learned features are the column space of ``V``.
"""

from dataclasses import dataclass, field

import numpy as np

from metarep.errors import DegenerateTasks, DimensionMismatch
from metarep.linalg import orthonormalize, principal_sin_theta
from metarep.optim import gradient_descent, lbfgs

DEFAULT_C0 = 10.0


@dataclass(frozen=True)
class FactorPair:
    u: np.ndarray  # (t, r)
    v: np.ndarray  # (d, r)

    def __post_init__(self):
        u = np.atleast_2d(np.asarray(self.u, dtype=float))
        v = np.atleast_2d(np.asarray(self.v, dtype=float))
        if u.shape[1] != v.shape[1]:
            raise DimensionMismatch(f"U {u.shape} and V {v.shape} disagree on r")
        if not (np.all(np.isfinite(u)) and np.all(np.isfinite(v))):
            raise ValueError("factor pair has non-finite entries")
        object.__setattr__(self, "u", u)
        object.__setattr__(self, "v", v)

    @property
    def rank(self):
        return self.u.shape[1]

    def product(self):
        return self.u @ self.v.T

    def flat(self):
        return np.concatenate([self.u.ravel(), self.v.ravel()])

    @classmethod
    def from_flat(cls, x, t, d, r):
        return cls(x[: t * r].reshape(t, r), x[t * r:].reshape(d, r))


@dataclass(frozen=True)
class ConstraintSet:
    c0: float
    row_bound: float
    u_bound: float
    v_bound: float


@dataclass(frozen=True)
class ConstraintReport:
    inside: bool
    max_row_norm_sq: float
    u_norm_sq: float
    v_norm_sq: float
    bounds: ConstraintSet
    violated: tuple


@dataclass
class OptimizerReport:
    final_pair: FactorPair
    final_objective: float
    iterations: int
    grad_norm: float
    converged: bool
    in_constraint_set: bool | None
    line_search_failed: bool = False
    message: str = ""
    history: list = field(default_factory=list)


def _check(pair, data):
    if data is None:
        return
    t, d = pair.u.shape[0], pair.v.shape[0]
    if data.d != d:
        raise DimensionMismatch(f"V has {d} rows but covariates have dimension {data.d}")
    if data.num_tasks != t:
        raise DimensionMismatch(f"U has {t} rows but data has {data.num_tasks} tasks")


def _residuals(pair, data):
    proj = data.covariates @ pair.v  # (n, r)
    pred = np.einsum("ij,ij->i", pair.u[data.task_index], proj)
    return pred - data.responses, proj


def objective_value(pair, data):
    """Objective at `pair`. ``data=None`` evaluates the regularizer alone."""
    _check(pair, data)
    gap = pair.u.T @ pair.u - pair.v.T @ pair.v
    reg = 0.5 * float(np.sum(gap**2))
    if data is None:
        return reg
    res, _ = _residuals(pair, data)
    return 2.0 * pair.u.shape[0] / data.n * float(res @ res) + reg


def _value_and_grad(pair, data):
    u, v = pair.u, pair.v
    gap = u.T @ u - v.T @ v
    f = 0.5 * float(np.sum(gap**2))
    gu = 2.0 * u @ gap
    gv = -2.0 * v @ gap
    if data is not None:
        t = u.shape[0]
        res, proj = _residuals(pair, data)
        scale = 2.0 * t / data.n
        f += scale * float(res @ res)
        w = 2.0 * scale * res
        gu_data = np.zeros_like(u)
        np.add.at(gu_data, data.task_index, w[:, None] * proj)
        gu += gu_data
        gv += data.covariates.T @ (w[:, None] * u[data.task_index])
    return f, gu, gv


def objective_gradient(pair, data):
    """Analytic ``(df/dU, df/dV)``."""
    _check(pair, data)
    _, gu, gv = _value_and_grad(pair, data)
    return gu, gv


def planted_pair(tasks, features):
    """Balanced factors of ``M* = A B^T`` from its SVD: ``U* = X D^1/2``, ``V* = Y D^1/2``."""
    m = tasks.matrix_a @ np.asarray(features).T
    r = tasks.rank_r
    x, s, yt = np.linalg.svd(m, full_matrices=False)
    root = np.sqrt(s[:r])
    return FactorPair(x[:, :r] * root, yt[:r].T * root)


def constraint_set_from_tasks(stats, t, r, c0=DEFAULT_C0):
    """Incoherence ball with row, U and V bounds scaled by `c0`."""
    if not stats.nu > 0:
        raise DegenerateTasks("constraint set requires nu > 0")
    root = np.sqrt(stats.kappa * stats.nu)
    return ConstraintSet(
        c0=float(c0),
        row_bound=float(c0 * stats.kappa_bar * r * root / np.sqrt(t)),
        u_bound=float(c0 * np.sqrt(t) * root),
        v_bound=float(c0 * np.sqrt(t) * root),
    )


def in_constraint_set(pair, w):
    """Membership of `pair` in `w`; norms of U and V are spectral."""
    rows = float(np.max(np.sum(pair.u**2, axis=1)))
    un = float(np.linalg.norm(pair.u, 2) ** 2)
    vn = float(np.linalg.norm(pair.v, 2) ** 2)
    violated = tuple(
        name
        for name, val, bound in (("row", rows, w.row_bound), ("u", un, w.u_bound), ("v", vn, w.v_bound))
        if val > bound
    )
    return ConstraintReport(not violated, rows, un, vn, w, violated)


def init_pair(data, r, rng):
    """Random start: entries N(0, 1/sqrt(r)) times sqrt(rms(y)) in each factor."""
    scale = float(np.sqrt(np.mean(data.responses**2)))
    scale = np.sqrt(scale) if scale > 0 else 1.0
    std = r**-0.25 * scale
    u = rng.normal(0.0, std, size=(data.num_tasks, r))
    v = rng.normal(0.0, std, size=(data.d, r))
    return FactorPair(u, v)


def optimize(data, r, max_iters=2000, grad_tol=1e-8, seed=0, method="lbfgs", constraints=None):
    """Minimize the objective from a seeded random start.

    Parameters
    ----------
    seed : int or numpy Generator
        Source of the initialization.
    method : {"lbfgs", "gd"}
        L-BFGS (memory 10, strong-Wolfe line search) or gradient descent with
        backtracking.
    constraints : ConstraintSet, optional
        When given, membership of the final pair is reported.
    """
    if r < 1:
        raise ValueError(f"need r >= 1, got {r}")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    t, d = data.num_tasks, data.d
    start = init_pair(data, r, rng)

    def fg(x):
        f, gu, gv = _value_and_grad(FactorPair.from_flat(x, t, d, r), data)
        return f, np.concatenate([gu.ravel(), gv.ravel()])

    if method == "lbfgs":
        res = lbfgs(fg, start.flat(), max_iters=max_iters, grad_tol=grad_tol)
    elif method == "gd":
        res = gradient_descent(fg, start.flat(), max_iters=max_iters, grad_tol=grad_tol)
    else:
        raise ValueError(f"unknown method {method!r}")
    pair = FactorPair.from_flat(res.x, t, d, r)
    inside = None if constraints is None else in_constraint_set(pair, constraints).inside
    return OptimizerReport(
        final_pair=pair,
        final_objective=res.fun,
        iterations=res.iterations,
        grad_norm=res.grad_norm,
        converged=res.converged,
        in_constraint_set=inside,
        line_search_failed=res.line_search_failed,
        message=res.message,
        history=res.history,
    )


def extract_features(pair):
    """Orthonormal basis for the column space of V."""
    return orthonormalize(pair.v)


def frob_to_angle_bound(pair, planted_m, nu_t=None):
    """Both sides of ``sin^2 theta(V_hat, V*) <= ||U_hat V_hat^T - M*||_F^2 / (nu t)``.

    ``V*`` is the top-r right singular subspace of `planted_m`, and `nu_t`
    defaults to ``sigma_r(M*)^2``, i.e. ``sigma_r(U^T U)`` for the
    factorization of ``M*`` with orthonormal right factor.

    Returns
    -------
    lhs, rhs : float
    """
    m = np.asarray(planted_m, dtype=float)
    r = pair.rank
    if m.shape != (pair.u.shape[0], pair.v.shape[0]):
        raise DimensionMismatch(f"M* {m.shape} does not match pair {pair.u.shape[0]}x{pair.v.shape[0]}")
    _, s, yt = np.linalg.svd(m, full_matrices=False)
    if nu_t is None:
        nu_t = s[r - 1] ** 2 if r <= s.shape[0] else 0.0
    if not nu_t > 0:
        raise DegenerateTasks("sigma_r of the planted task factor is zero")
    eps = float(np.sum((pair.product() - m) ** 2))
    lhs = principal_sin_theta(yt[:r].T, orthonormalize(pair.v)) ** 2
    return lhs, eps / nu_t
