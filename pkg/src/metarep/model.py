"""Synthetic multi-task linear regression instances.

Responses follow ``y_i = x_i^T B alpha_{t(i)} + eps_i`` with ``x_i ~ N(0, I_d)``
and ``eps_i ~ N(0, 1)``. ``B`` is a Haar-random ``d x r`` orthonormal basis and
task vectors are drawn as ``alpha_j ~ N(0, I_r / r)``.
"""

from dataclasses import dataclass

import numpy as np

from metarep.errors import DegenerateTasks, IndexOutOfRange, InvalidDims
from metarep.linalg import orthonormalize

SAMPLING_MODES = ("round_robin", "uniform")
# Singular values of A^T A / t at or below this fraction of the largest are zero.
DIVERSITY_RTOL = 1e-12


def make_rng(master_seed, *key):
    """Counter-based generator for the sub-stream ``(master_seed, *key)``.

    The stream is Philox keyed by a ``SeedSequence`` whose spawn key is the
    tuple of non-negative integers in `key` (e.g. sweep index, repetition),
    so any job can rebuild its stream without reference to scheduling order.
    """
    seq = np.random.SeedSequence(int(master_seed), spawn_key=tuple(int(k) for k in key))
    return np.random.Generator(np.random.Philox(seq))


def stream_seed(master_seed, *key):
    """A 63-bit integer fingerprint of the sub-stream, for bookkeeping."""
    seq = np.random.SeedSequence(int(master_seed), spawn_key=tuple(int(k) for k in key))
    return int(seq.generate_state(1, dtype=np.uint64)[0] >> np.uint64(1))


@dataclass(frozen=True)
class TaskSet:
    matrix_a: np.ndarray  # (t, r), rows are task vectors

    def __post_init__(self):
        a = np.asarray(self.matrix_a, dtype=float)
        if a.ndim != 2 or a.shape[0] < 1 or a.shape[1] < 1:
            raise InvalidDims(f"task matrix must be (t, r) with t, r >= 1, got {a.shape}")
        if not np.all(np.isfinite(a)):
            raise ValueError("task matrix has non-finite entries")
        object.__setattr__(self, "matrix_a", a)

    @property
    def count_t(self):
        return self.matrix_a.shape[0]

    @property
    def rank_r(self):
        return self.matrix_a.shape[1]


@dataclass(frozen=True)
class DiversityStats:
    nu: float
    kappa_bar: float
    kappa: float
    trace_norm: float


@dataclass(frozen=True)
class DataSet:
    covariates: np.ndarray  # (n, d)
    responses: np.ndarray  # (n,)
    task_index: np.ndarray  # (n,) int
    num_tasks: int

    def __post_init__(self):
        x = np.asarray(self.covariates, dtype=float)
        y = np.asarray(self.responses, dtype=float).reshape(-1)
        idx = np.asarray(self.task_index, dtype=np.int64).reshape(-1)
        if x.ndim != 2 or x.shape[0] < 1:
            raise InvalidDims(f"covariates must be (n, d) with n >= 1, got {x.shape}")
        if y.shape[0] != x.shape[0] or idx.shape[0] != x.shape[0]:
            raise InvalidDims("covariates, responses and task_index disagree on n")
        if idx.min() < 0 or idx.max() >= self.num_tasks:
            raise IndexOutOfRange(f"task indices must lie in [0, {self.num_tasks})")
        object.__setattr__(self, "covariates", x)
        object.__setattr__(self, "responses", y)
        object.__setattr__(self, "task_index", idx)

    @property
    def n(self):
        return self.covariates.shape[0]

    @property
    def d(self):
        return self.covariates.shape[1]


@dataclass(frozen=True)
class Instance:
    true_features: np.ndarray  # B, (d, r)
    tasks: TaskSet
    train: DataSet
    new_task_alpha: np.ndarray  # (r,)
    test: DataSet  # every task index equals tasks.count_t


@dataclass(frozen=True)
class EmpiricalTaskMatrix:
    lambda_bar: np.ndarray  # (r, r)
    nu_tilde: float
    kappa_tilde: float


@dataclass(frozen=True)
class IncoherenceReport:
    holds: bool
    max_leverage: float
    bound: float
    leverages: np.ndarray


def sample_features(d, r, rng):
    """Haar-random r-dimensional subspace of R^d, as a (d, r) orthonormal basis."""
    if not 1 <= r <= d:
        raise InvalidDims(f"need 1 <= r <= d, got d={d}, r={r}")
    return orthonormalize(rng.standard_normal((d, r)))


def sample_tasks(t, r, rng):
    if t < 1 or r < 1:
        raise InvalidDims(f"need t, r >= 1, got t={t}, r={r}")
    return TaskSet(rng.standard_normal((t, r)) / np.sqrt(r))


def _check_dims(features, tasks):
    if features.ndim != 2 or features.shape[1] != tasks.rank_r:
        raise InvalidDims(f"features {features.shape} do not match task rank {tasks.rank_r}")


def generate_task_data(features, alpha, n, rng, task_id=0, num_tasks=None, noise_std=1.0):
    """`n` samples from the single task with coefficients `alpha`."""
    features = np.asarray(features, dtype=float)
    alpha = np.asarray(alpha, dtype=float).reshape(-1)
    if n < 1:
        raise InvalidDims(f"need n >= 1, got {n}")
    if features.shape[1] != alpha.shape[0]:
        raise InvalidDims(f"features {features.shape} do not match alpha of length {alpha.shape[0]}")
    x = rng.standard_normal((n, features.shape[0]))
    eps = rng.standard_normal(n)
    y = x @ (features @ alpha) + noise_std * eps
    return DataSet(x, y, np.full(n, task_id), task_id + 1 if num_tasks is None else num_tasks)


def generate_data(features, tasks, n_per_task, sampling, rng, noise_std=1.0):
    """Training samples for every task in `tasks`.

    ``round_robin`` cycles through the tasks so each receives exactly
    `n_per_task` samples; ``uniform`` draws each sample's task uniformly at
    random, with ``t * n_per_task`` samples in total. `noise_std` other than
    1 exists for noiseless oracle tests only.
    """
    features = np.asarray(features, dtype=float)
    _check_dims(features, tasks)
    if n_per_task < 1:
        raise InvalidDims(f"need n_per_task >= 1, got {n_per_task}")
    t = tasks.count_t
    n = t * n_per_task
    if sampling == "round_robin":
        idx = np.tile(np.arange(t), n_per_task)
    elif sampling == "uniform":
        idx = rng.integers(0, t, size=n)
    else:
        raise ValueError(f"unknown sampling mode {sampling!r}")
    x = rng.standard_normal((n, features.shape[0]))
    eps = rng.standard_normal(n)
    betas = tasks.matrix_a @ features.T  # (t, d)
    y = np.einsum("ij,ij->i", x, betas[idx]) + noise_std * eps
    return DataSet(x, y, idx, t)


def make_instance(d, r, t, n_per_task, n2, rng, sampling="round_robin", noise_std=1.0):
    """A full two-stage problem: t training tasks plus one held-out task.

    Components draw from independent child streams of `rng`, so for a given
    seed the features and tasks do not depend on the sample sizes.
    """
    rng_b, rng_a, rng_train, rng_new, rng_test = rng.spawn(5)
    b = sample_features(d, r, rng_b)
    tasks = sample_tasks(t, r, rng_a)
    train = generate_data(b, tasks, n_per_task, sampling, rng_train, noise_std=noise_std)
    alpha_new = rng_new.standard_normal(r) / np.sqrt(r)
    test = generate_task_data(b, alpha_new, n2, rng_test, task_id=t, noise_std=noise_std)
    return Instance(b, tasks, train, alpha_new, test)


def _sym_spectrum(s):
    vals = np.linalg.eigvalsh(0.5 * (s + s.T))[::-1]
    vals = np.clip(vals, 0.0, None)
    if vals[-1] <= DIVERSITY_RTOL * vals[0]:
        vals[-1] = 0.0
    return vals


def diversity_stats(tasks):
    """Diversity ``nu`` and condition numbers of ``A^T A / t``.

    Rank-deficient task matrices give ``nu = 0`` and infinite condition
    numbers rather than an error.
    """
    a = tasks.matrix_a
    gram = a.T @ a / tasks.count_t
    vals = _sym_spectrum(gram)
    nu = float(vals[-1])
    trace = float(np.trace(gram))
    if nu == 0.0:
        return DiversityStats(0.0, np.inf, np.inf, trace)
    return DiversityStats(nu, trace / (tasks.rank_r * nu), float(vals[0]) / nu, trace)


def empirical_task_matrix(tasks, data):
    idx = data.task_index
    if idx.max() >= tasks.count_t:
        raise IndexOutOfRange(f"task index {idx.max()} >= t={tasks.count_t}")
    counts = np.bincount(idx, minlength=tasks.count_t).astype(float)
    a = tasks.matrix_a
    lam = (a * counts[:, None]).T @ a / data.n
    lam = 0.5 * (lam + lam.T)
    vals = _sym_spectrum(lam)
    nu = float(vals[-1])
    kappa = float(np.trace(lam)) / (tasks.rank_r * nu) if nu > 0 else np.inf
    return EmpiricalTaskMatrix(lam, nu, kappa)


def incoherence_check(tasks, c, slack=1e-10):
    """Check ``max_j ||e_j^T U||^2 <= c * mu * r / t`` for the left singular basis U of A.

    Here ``mu = 1 / (r * nu)``. Holds whenever ``c >= max_j ||alpha_j||^2``.
    """
    stats = diversity_stats(tasks)
    if stats.nu == 0.0:
        raise DegenerateTasks("task matrix is rank deficient (nu = 0)")
    t, r = tasks.count_t, tasks.rank_r
    u, _, _ = np.linalg.svd(tasks.matrix_a, full_matrices=False)
    lev = np.sum(u**2, axis=1)
    mu = 1.0 / (r * stats.nu)
    bound = c * mu * r / t
    m = float(lev.max())
    return IncoherenceReport(m <= bound + slack, m, float(bound), lev)
