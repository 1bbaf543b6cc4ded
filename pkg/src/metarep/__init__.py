"""Learning a shared linear representation across regression tasks.

Two feature estimators (a spectral method-of-moments estimator and a
regularized Burer-Monteiro factorization fit by L-BFGS), transfer of the
learned features to a new task, and a seeded experiment harness.
"""

from metarep.errors import (
    ConfigError,
    DegenerateTasks,
    DimensionMismatch,
    IndexOutOfRange,
    InvalidDims,
    LineSearchFailure,
    MetarepError,
    NotSymmetric,
    RankDeficient,
    SpectralGapWarning,
)
from metarep.linalg import least_squares, orthonormalize, principal_sin_theta, top_r_eigs
from metarep.model import (
    DataSet,
    DiversityStats,
    EmpiricalTaskMatrix,
    Instance,
    TaskSet,
    diversity_stats,
    empirical_task_matrix,
    generate_data,
    incoherence_check,
    make_instance,
    sample_features,
    sample_tasks,
)
from metarep.mom import empirical_second_moment, mom_estimate, population_moment
from metarep.landscape import (
    ConstraintSet,
    FactorPair,
    OptimizerReport,
    constraint_set_from_tasks,
    extract_features,
    in_constraint_set,
    objective_gradient,
    objective_value,
    optimize,
)
from metarep.transfer import TransferFit, evaluate_transfer, fit_new_task

__version__ = "0.1.0"
