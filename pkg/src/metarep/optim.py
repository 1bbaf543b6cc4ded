"""First-order minimizers over a flat parameter vector.

Both take ``fun_and_grad(x) -> (f, g)`` and stop when ``max|g| <= grad_tol``.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize


@dataclass
class MinimizeResult:
    x: np.ndarray
    fun: float
    iterations: int
    grad_norm: float  # max-abs entry of the gradient at x
    converged: bool
    line_search_failed: bool
    message: str
    history: list = field(default_factory=list)  # objective at each accepted iterate, x0 first


def lbfgs(fun_and_grad, x0, max_iters=2000, grad_tol=1e-8, memory=10):
    """Limited-memory BFGS with a strong-Wolfe line search (scipy's L-BFGS-B, unbounded)."""
    cache = {}

    def fg(x):
        key = x.tobytes()
        if key not in cache:
            cache.clear()
            f, g = fun_and_grad(x)
            cache[key] = (float(f), np.asarray(g, dtype=float))
        return cache[key]

    f0, _ = fg(np.asarray(x0, dtype=float))
    history = [f0]

    def callback(intermediate_result):
        history.append(float(intermediate_result.fun))

    res = minimize(
        fg,
        np.asarray(x0, dtype=float),
        jac=True,
        method="L-BFGS-B",
        callback=callback,
        options={
            "maxcor": memory,
            "maxiter": max_iters,
            "maxfun": 20 * max_iters,
            "gtol": grad_tol,
            "ftol": 0.0,
            "maxls": 40,
        },
    )
    f, g = fg(res.x)
    gnorm = float(np.max(np.abs(g)))
    msg = str(res.message)
    return MinimizeResult(
        x=res.x,
        fun=f,
        iterations=int(res.nit),
        grad_norm=gnorm,
        converged=gnorm <= grad_tol,
        line_search_failed="LNSRCH" in msg.upper(),
        message=msg,
        history=history,
    )


def gradient_descent(fun_and_grad, x0, max_iters=2000, grad_tol=1e-8, step0=1.0,
                     shrink=0.5, armijo=1e-4, max_backtracks=60):
    """Gradient descent with Armijo backtracking; each step grows the trial step by 2."""
    x = np.asarray(x0, dtype=float).copy()
    f, g = fun_and_grad(x)
    history = [float(f)]
    step = step0
    it = 0
    failed = False
    while it < max_iters and np.max(np.abs(g)) > grad_tol:
        gg = float(g @ g)
        for _ in range(max_backtracks):
            x_new = x - step * g
            f_new, g_new = fun_and_grad(x_new)
            if f_new <= f - armijo * step * gg:
                break
            step *= shrink
        else:
            failed = True
            break
        x, f, g = x_new, f_new, g_new
        history.append(float(f))
        step *= 2.0
        it += 1
    gnorm = float(np.max(np.abs(g)))
    if failed:
        msg = "line search failed to find a decrease"
    elif gnorm <= grad_tol:
        msg = "converged"
    else:
        msg = "iteration limit reached"
    return MinimizeResult(x, float(f), it, gnorm, gnorm <= grad_tol, failed, msg, history)
