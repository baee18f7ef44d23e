"""Baseline solvers that work on the simplex directly.

Projected gradient descent with a feasible-direction Armijo search, entropic
mirror descent (the exponentiated-gradient / multiplicative-weights update of
Beck and Teboulle 2003), and Frank-Wolfe with either the 2/(k+2) schedule or
exact segment line search for quadratics.  All iterates stay on the simplex
at every iteration.

Trace conventions: the ``grad_norm`` column records the scaled projection
residual ``||P(x - s grad) - x|| / s`` for PGD, the displacement rate
``||x_{k+1} - x_k|| / step`` for EMDA, and the duality gap
``<grad, x - s>`` for Frank-Wolfe.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .geometry import SimplexPoint
from .hadamard import Objective
from .optimizers import RunTrace, Status, _TraceBuilder, _coords
from .projection import ProjectionAlgo, project_simplex_array

Array = np.ndarray

__all__ = ["PgdConfig", "pgd_linesearch", "emda", "frank_wolfe"]


@dataclass
class PgdConfig:
    """Projected-gradient knobs: base step ``s``, Armijo backtracking, stopping.

    Stops when the scaled projection residual drops to ``grad_tol`` (zero
    disables the check, as in :class:`~hadopt.optimizers.RgdConfig`) or the
    objective reaches ``target_value``.  The benchmark default step is
    ``20 / L`` via :meth:`for_least_squares`; this exceeds the classical
    ``1 / L`` rule and is taken as given from the benchmark recipe.
    """

    base_step: float
    decay: float = 0.75
    armijo: float = 1e-4
    max_backtracks: int = 25
    max_iters: int = 1000
    grad_tol: float = 1e-8
    target_value: Optional[float] = None

    def __post_init__(self):
        if self.base_step <= 0:
            raise ValueError("base_step must be positive")
        if not 0.0 < self.decay < 1.0:
            raise ValueError("decay must lie in (0, 1)")
        if not 0.0 < self.armijo < 1.0:
            raise ValueError("armijo must lie in (0, 1)")
        if self.max_backtracks < 0 or self.max_iters < 1:
            raise ValueError("max_backtracks must be >= 0 and max_iters >= 1")

    @classmethod
    def for_least_squares(cls, L: float, **kw) -> "PgdConfig":
        return cls(base_step=20.0 / L, **kw)


def _pgd_stopped(fx: float, resid: float, cfg: PgdConfig) -> bool:
    if cfg.grad_tol > 0.0 and resid <= cfg.grad_tol:
        return True
    return cfg.target_value is not None and fx <= cfg.target_value


def pgd_linesearch(
    f: Objective,
    x0,
    cfg: PgdConfig,
    algo: ProjectionAlgo = ProjectionAlgo.DUCHI,
):
    """Projected gradient descent with a feasible-direction Armijo search.

    Each iteration projects the full gradient step,
    ``xbar = P(x - s grad)``, then backtracks along the feasible segment
    ``x + alpha (xbar - x)`` with ``alpha = decay**m``, ``m = 0..max_backtracks``,
    accepting once ``f(x) - f(x_new) >= -armijo * <grad, xbar - x>``.  A
    failed search takes the last trial step and is recorded in the trace.
    """
    tr = _TraceBuilder()
    x = _coords(x0)
    fx = f.value(x)
    grad = f.gradient(x)
    xbar = project_simplex_array(x - cfg.base_step * grad, algo=algo)
    d = xbar - x
    resid = float(np.linalg.norm(d)) / cfg.base_step
    tr.add(0, fx, resid, 0.0, 0)
    k = 0
    status = Status.MAX_ITERS
    last_failed = False
    while k < cfg.max_iters:
        if _pgd_stopped(fx, resid, cfg):
            status = Status.CONVERGED
            break
        slope = float(np.dot(grad, d))  # <= 0 by the projection property
        accepted = False
        alpha = 1.0
        m = 0
        for m in range(cfg.max_backtracks + 1):
            alpha = cfg.decay**m
            x_new = x + alpha * d
            f_new = f.value(x_new)
            if fx - f_new >= -cfg.armijo * slope:
                accepted = True
                break
        last_failed = not accepted
        backtracks = m if accepted else cfg.max_backtracks + 1
        k += 1
        x = x + alpha * d
        fx = f.value(x)
        grad = f.gradient(x)
        xbar = project_simplex_array(x - cfg.base_step * grad, algo=algo)
        d = xbar - x
        resid = float(np.linalg.norm(d)) / cfg.base_step
        tr.add(k, fx, resid, alpha, backtracks)
    else:
        if _pgd_stopped(fx, resid, cfg):
            status = Status.CONVERGED
    if status is Status.MAX_ITERS and last_failed:
        status = Status.LINE_SEARCH_FAILED
    return SimplexPoint(x), tr.build(status, None)


def emda(
    f: Objective,
    x0,
    step: float,
    K: int,
    target_value: Optional[float] = None,
):
    """Entropic mirror descent with a constant step size.

    Multiplicative update ``x <- x * exp(-step * grad)`` renormalized to sum
    one; the exponent is shifted by its maximum before exponentiation so the
    update never overflows.  Requires a strictly positive start (the update
    cannot leave or re-enter the boundary).
    """
    if step <= 0 or K < 1:
        raise ValueError("step must be positive and K >= 1")
    x = _coords(x0)
    if np.any(x <= 0.0):
        raise ValueError("entropic mirror descent needs a strictly positive start")
    tr = _TraceBuilder()
    fx = f.value(x)
    tr.add(0, fx, np.inf, 0.0, 0)
    status = Status.MAX_ITERS
    for k in range(1, K + 1):
        if target_value is not None and fx <= target_value:
            status = Status.CONVERGED
            break
        w = -step * f.gradient(x)
        w -= np.max(w)
        x_new = x * np.exp(w)
        x_new /= np.sum(x_new)
        resid = float(np.linalg.norm(x_new - x)) / step
        x = x_new
        fx = f.value(x)
        tr.add(k, fx, resid, step, 0)
    else:
        if target_value is not None and fx <= target_value:
            status = Status.CONVERGED
    return SimplexPoint(x), tr.build(status, None)


def frank_wolfe(
    f: Objective,
    x0,
    K: int,
    linesearch: bool = False,
    gap_tol: float = 0.0,
    target_value: Optional[float] = None,
    pairwise: bool = False,
):
    """Frank-Wolfe over the simplex: the linear minimization oracle is the
    vertex with the smallest gradient coordinate.

    Steps follow the ``2 / (k + 2)`` schedule unless ``linesearch`` is set, in
    which case the segment minimizer is computed in closed form through the
    Hessian-vector product (quadratic objectives).  ``pairwise`` moves mass
    from the worst in-support vertex to the best vertex instead (also
    closed-form, so it requires ``linesearch``).  Stops on the duality gap
    ``<grad, x - s>`` when ``gap_tol`` is positive.
    """
    if K < 1:
        raise ValueError("K must be at least 1")
    if pairwise and not linesearch:
        raise ValueError("the pairwise step is only provided with line search")
    if linesearch and f.hessian_vec is None:
        raise ValueError("line search needs hessian_vec (exact segment minimizer for quadratics)")
    x = _coords(x0).copy()
    tr = _TraceBuilder()
    fx = f.value(x)
    grad = f.gradient(x)
    i = int(np.argmin(grad))
    gap = float(np.dot(grad, x) - grad[i])
    tr.add(0, fx, gap, 0.0, 0)
    status = Status.MAX_ITERS
    for k in range(1, K + 1):
        if gap <= gap_tol or (target_value is not None and fx <= target_value):
            status = Status.CONVERGED
            break
        if pairwise:
            support = np.nonzero(x > 0.0)[0]
            j = support[int(np.argmax(grad[support]))]
            d = np.zeros_like(x)
            d[i] += 1.0
            d[j] -= 1.0
            gamma_max = float(x[j])
            pair_gap = float(grad[j] - grad[i])
            curv = float(np.dot(d, f.hessian_vec(x, d)))
            gamma = gamma_max if curv <= 0.0 else min(gamma_max, pair_gap / curv)
            x = x + gamma * d
            if gamma == gamma_max:
                x[j] = 0.0
        else:
            d = -x.copy()
            d[i] += 1.0
            if linesearch:
                curv = float(np.dot(d, f.hessian_vec(x, d)))
                gamma = 1.0 if curv <= 0.0 else min(1.0, gap / curv)
            else:
                gamma = 2.0 / (k + 2.0)
            x = x + gamma * d
        np.clip(x, 0.0, None, out=x)
        x /= np.sum(x)
        fx = f.value(x)
        grad = f.gradient(x)
        i = int(np.argmin(grad))
        gap = float(np.dot(grad, x) - grad[i])
        tr.add(k, fx, gap, gamma, 0)
    else:
        if gap <= gap_tol or (target_value is not None and fx <= target_value):
            status = Status.CONVERGED
    return SimplexPoint(x), tr.build(status, None)
