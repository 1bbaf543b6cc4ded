"""Seeded sweeps over the two-stage feature-learning pipeline."""

import logging
import time
from concurrent.futures import ProcessPoolExecutor

import numpy as np
from threadpoolctl import threadpool_limits

from metarep.landscape import constraint_set_from_tasks, extract_features, optimize
from metarep.linalg import principal_sin_theta
from metarep.model import diversity_stats, make_instance, make_rng, stream_seed
from metarep.mom import mom_estimate
from metarep.transfer import evaluate_transfer
from metarep.experiments.results import TrialResult, summarize

log = logging.getLogger(__name__)


def _learn(estimator, inst, cfg, rng):
    """Learned basis plus (optimizer_iters, in_constraint_set) for one estimator."""
    r = cfg.r
    if estimator == "mom":
        return mom_estimate(inst.train, r).basis, None, None
    stats = diversity_stats(inst.tasks)
    w = constraint_set_from_tasks(stats, inst.tasks.count_t, r, cfg.c0) if stats.nu > 0 else None
    rep = optimize(inst.train, r, max_iters=cfg.max_iters, grad_tol=cfg.grad_tol, seed=rng, constraints=w)
    if not rep.converged:
        log.debug("optimizer stopped without converging: %s", rep.message)
    return extract_features(rep.final_pair), rep.iterations, rep.in_constraint_set


def run_trial(cfg, sweep_index, rep, timing=False):
    """All estimators on one seeded instance; returns one TrialResult per estimator."""
    value = cfg.sweep_values[sweep_index]
    t, n_per_task = cfg.dims(value)
    seed = stream_seed(cfg.master_seed, sweep_index, rep)
    rng = make_rng(cfg.master_seed, sweep_index, rep)
    out = []
    with threadpool_limits(limits=1):
        inst = make_instance(cfg.d, cfg.r, t, n_per_task, cfg.n2, rng, sampling=cfg.sampling)
        opt_rngs = dict(zip(cfg.estimators, rng.spawn(len(cfg.estimators))))
        for est in cfg.estimators:
            start = time.perf_counter()
            common = dict(estimator=est, sweep_var=cfg.sweep_var, sweep_value=value, rep=rep, seed=seed)
            try:
                basis, iters, inside = _learn(est, inst, cfg, opt_rngs[est])
                fit = evaluate_transfer(inst.true_features, inst.new_task_alpha, basis, inst.test)
                millis = (time.perf_counter() - start) * 1e3
                out.append(TrialResult(
                    **common,
                    sin_theta=principal_sin_theta(basis, inst.true_features),
                    transfer_error_sq=fit.param_error_sq,
                    baseline_error_sq=fit.baseline_error_sq,
                    optimizer_iters=iters,
                    in_constraint_set=inside,
                    wall_millis=millis if timing else None,
                ))
            except Exception as exc:  # recorded as a failed row
                log.warning("trial %s value=%s rep=%s failed: %s", est, value, rep, exc)
                out.append(TrialResult(**common, sin_theta=None, transfer_error_sq=None,
                                       baseline_error_sq=None, error=repr(exc)))
    return out


def _run_job(args):
    return run_trial(*args)


def run_experiment(cfg, workers=1, timing=False):
    """Run every (sweep point, repetition) and return ``(trials, summary_rows)``.

    Each job draws only from its own sub-stream, so the trials do not depend
    on `workers`. Wall-clock times are recorded only with ``timing=True``,
    since they would otherwise make the output non-reproducible.
    """
    jobs = [(cfg, i, rep, timing) for i in range(len(cfg.sweep_values)) for rep in range(cfg.reps)]
    if workers <= 1:
        batches = [_run_job(job) for job in jobs]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            batches = list(pool.map(_run_job, jobs, chunksize=max(1, len(jobs) // (4 * workers))))
    trials = sorted((t for batch in batches for t in batch), key=TrialResult.sort_key)
    return trials, summarize(trials)


def mean_metric(trials, estimator, sweep_value, metric):
    xs = [getattr(t, metric) for t in trials
          if t.estimator == estimator and t.sweep_value == sweep_value and getattr(t, metric) is not None]
    return float(np.mean(xs)) if xs else float("nan")
