"""Multi-start BFGS minimization of the QAOA cost expectation."""

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
import math

import numpy as np

from .errors import ParameterError
from .rng import derive_seed, make_rng
from .simulator import (QaoaAngles, build_cost_diagonal, qaoa_cost,
                        qaoa_cost_and_gradient)

FD_STEP = 1e-6
GRAD_TOL = 1e-6
REL_COST_TOL = 1e-10
ARMIJO = 1e-4
DEFAULT_RESTARTS = 1000


@dataclass
class OptimizationResult:
    angles: QaoaAngles
    cost: float
    n_iterations: int
    restart_index: int
    converged: bool

    def to_dict(self, problem_id=None, restarts=None, seed=None):
        return {"problem_id": problem_id, "p": self.angles.p, "restarts": restarts,
                "best_cost": self.cost, "angles": self.angles.to_dict(), "seed": seed,
                "restart_index": self.restart_index, "n_iterations": self.n_iterations,
                "converged": self.converged}


def sample_initial_angles(p, seed):
    """``gamma ~ U[0, 2 pi)``, ``beta ~ U[0, pi)`` i.i.d. per layer."""
    if p < 1:
        raise ParameterError(f"depth must be at least 1, got {p}")
    rng = make_rng(seed)
    gammas = rng.uniform(0.0, 2.0 * math.pi, size=p)
    betas = rng.uniform(0.0, math.pi, size=p)
    return QaoaAngles(betas, gammas)


def gradient(g, angles, h=FD_STEP, diag=None):
    """Central finite-difference gradient of the cost, ordered ``[betas, gammas]``."""
    if diag is None:
        diag = build_cost_diagonal(g)
    x = angles.to_vector()
    out = np.empty_like(x)
    for k in range(x.size):
        step = np.zeros_like(x)
        step[k] = h
        plus = qaoa_cost(g, QaoaAngles.from_vector(x + step), diag)
        minus = qaoa_cost(g, QaoaAngles.from_vector(x - step), diag)
        out[k] = (plus - minus) / (2.0 * h)
    return out


def _objective(g, diag, method):
    if method == "adjoint":
        def fun(x):
            return qaoa_cost_and_gradient(g, QaoaAngles.from_vector(x), diag)
    elif method == "fd":
        def fun(x):
            a = QaoaAngles.from_vector(x)
            return qaoa_cost(g, a, diag), gradient(g, a, diag=diag)
    else:
        raise ParameterError(f"unknown gradient method {method!r}")
    return fun


def bfgs(fun, x0, budget=500, gtol=GRAD_TOL, ftol=REL_COST_TOL):
    """Minimize ``fun(x) -> (f, grad)`` with BFGS and Armijo backtracking.

    Returns ``(x, f, n_iterations, converged)``. Accepted iterates never
    increase ``f``.
    """
    x = np.array(x0, dtype=float)
    f, gr = fun(x)
    dim = x.size
    hinv = np.eye(dim)
    for it in range(budget):
        if np.linalg.norm(gr) < gtol:
            return x, f, it, True
        d = -hinv @ gr
        slope = gr @ d
        if slope >= 0:
            hinv = np.eye(dim)
            d = -gr
            slope = -(gr @ gr)
        alpha = 1.0
        while True:
            x_new = x + alpha * d
            f_new, g_new = fun(x_new)
            if f_new <= f + ARMIJO * alpha * slope:
                break
            alpha *= 0.5
            if alpha < 1e-16:
                # no descent left at double precision
                return x, f, it, np.linalg.norm(gr) < 1e3 * gtol
        s = x_new - x
        y = g_new - gr
        x, f_old, f, gr = x_new, f, f_new, g_new
        if abs(f_old - f) <= ftol * max(1.0, abs(f)):
            return x, f, it + 1, True
        sy = s @ y
        if sy > 1e-12:
            if it == 0:
                hinv = np.eye(dim) * (sy / (y @ y))
            rho = 1.0 / sy
            v = np.eye(dim) - rho * np.outer(s, y)
            hinv = v @ hinv @ v.T + rho * np.outer(s, s)
    return x, f, budget, False


def minimize_single(g, init, budget=500, grad="adjoint", diag=None, restart_index=0):
    """BFGS from ``init`` over the unbounded angle space."""
    if diag is None:
        diag = build_cost_diagonal(g)
    x, f, nit, conv = bfgs(_objective(g, diag, grad), init.to_vector(), budget=budget)
    return OptimizationResult(QaoaAngles.from_vector(x), float(f), nit, restart_index, conv)


def restart_seed(seed, index):
    """Seed of restart ``index``; depends only on ``(seed, index)``."""
    return derive_seed(seed, index)


def _run_restart(args):
    g, init, budget, grad, index = args
    return minimize_single(g, init, budget=budget, grad=grad, restart_index=index)


def best_of(results):
    """Lowest cost; ties go to the lowest restart index."""
    return min(results, key=lambda r: (r.cost, r.restart_index))


def minimize_multistart(g, p, restarts=DEFAULT_RESTARTS, seed=0, budget=500,
                        grad="adjoint", extra_inits=(), workers=1):
    """Best of ``restarts`` BFGS runs from uniform random initial angles.

    ``extra_inits`` are tried in addition, with restart indices following the
    random ones (e.g. a depth ``p - 1`` optimum padded with an identity layer).
    """
    if restarts < 1:
        raise ParameterError(f"need at least one restart, got {restarts}")
    inits = [sample_initial_angles(p, restart_seed(seed, k)) for k in range(restarts)]
    for a in extra_inits:
        if a.p != p:
            raise ParameterError(f"extra initial point has depth {a.p}, expected {p}")
        inits.append(a)
    if workers > 1:
        jobs = [(g, a, budget, grad, k) for k, a in enumerate(inits)]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_restart, jobs, chunksize=max(1, len(jobs) // (4 * workers))))
    else:
        diag = build_cost_diagonal(g)
        results = [minimize_single(g, a, budget=budget, grad=grad, diag=diag, restart_index=k)
                   for k, a in enumerate(inits)]
    return best_of(results)
