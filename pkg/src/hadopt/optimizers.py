"""Sphere solvers for simplex-constrained minimization.

Four solvers share one recipe: pull the objective back through ``x = z * z``,
walk on the unit sphere with exact geodesic steps, and square the final
iterate to land back on the simplex.

- ``had_rgd``: fixed-step Riemannian gradient descent.
- ``had_prgd``: RGD plus tangent-space perturbation episodes that escape
  strict saddles when the gradient is small.
- ``had_rgd_aw``: geodesic backtracking accepting on an Armijo or a Wolfe
  condition (strict both-conditions mode available).
- ``had_rgd_bb``: Barzilai-Borwein spectral steps guarded by the nonmonotone
  line search of Zhang and Hager (SIAM J. Optim. 14, 2004).

Every solver returns the simplex iterate and a :class:`RunTrace`.  Identical
(config, start, seed) triples reproduce traces bit-identically apart from the
wall-clock column.
"""

from __future__ import annotations

import enum
import time
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .geometry import (
    SimplexPoint,
    exp_map,
    riemannian_gradient,
    sphere_geodesic,
    tangent_pullback_gradient,
)
from .hadamard import Objective, PullbackObjective, hadamard_sqrt

Array = np.ndarray

__all__ = [
    "Status",
    "RunTrace",
    "RgdConfig",
    "PrgdConfig",
    "AwConfig",
    "BbConfig",
    "had_rgd",
    "had_prgd",
    "had_rgd_aw",
    "had_rgd_bb",
    "had_rgd_bb_sphere",
    "tangent_space_steps",
    "uniform_tangent_ball",
]


class Status(enum.Enum):
    CONVERGED = "Converged"
    MAX_ITERS = "MaxIters"
    LINE_SEARCH_FAILED = "LineSearchFailed"


@dataclass
class RunTrace:
    """Per-iteration solver log.

    Row ``k`` describes the iterate after ``k`` updates: objective value,
    Riemannian gradient norm, the accepted step size and the number of extra
    line-search trials it took (0 means the first trial was accepted; one
    past the backtrack cap marks a failed search that fell back to the last
    trial step).  ``seconds`` is cumulative wall clock from solver start and
    is the only column exempt from bitwise reproducibility.
    """

    iterations: Array
    f_values: Array
    grad_norms: Array
    steps: Array
    seconds: Array
    backtracks: Array
    status: Status
    final_z: Optional[Array] = None

    def __len__(self) -> int:
        return int(self.iterations.shape[0])

    @property
    def n_iters(self) -> int:
        return int(self.iterations[-1])

    def iterations_to(self, target: float) -> Optional[int]:
        """First iteration index with f <= target, or None."""
        hits = np.nonzero(self.f_values <= target)[0]
        if hits.size == 0:
            return None
        return int(self.iterations[hits[0]])

    def seconds_to(self, target: float) -> Optional[float]:
        hits = np.nonzero(self.f_values <= target)[0]
        if hits.size == 0:
            return None
        return float(self.seconds[hits[0]])

    def to_csv(self, fileobj) -> None:
        """Write the trace as CSV to a path or an open text file."""
        if not hasattr(fileobj, "write"):
            with open(fileobj, "w") as fh:
                self.to_csv(fh)
            return
        fileobj.write("iteration,f,grad_norm,step,seconds,backtracks\n")
        for k, f, g, s, t, b in zip(
            self.iterations, self.f_values, self.grad_norms, self.steps, self.seconds, self.backtracks
        ):
            fileobj.write(f"{int(k)},{float(f)!r},{float(g)!r},{float(s)!r},{float(t)!r},{int(b)}\n")


class _TraceBuilder:
    def __init__(self):
        self.t0 = time.perf_counter()
        self.ks: list = []
        self.fs: list = []
        self.gs: list = []
        self.steps: list = []
        self.ts: list = []
        self.bts: list = []

    def add(self, k, f, gn, step, backtracks):
        self.ks.append(k)
        self.fs.append(f)
        self.gs.append(gn)
        self.steps.append(step)
        self.ts.append(time.perf_counter() - self.t0)
        self.bts.append(backtracks)

    def build(self, status: Status, final_z: Optional[Array]) -> RunTrace:
        return RunTrace(
            iterations=np.asarray(self.ks, dtype=np.int64),
            f_values=np.asarray(self.fs, dtype=float),
            grad_norms=np.asarray(self.gs, dtype=float),
            steps=np.asarray(self.steps, dtype=float),
            seconds=np.asarray(self.ts, dtype=float),
            backtracks=np.asarray(self.bts, dtype=np.int64),
            status=status,
            final_z=final_z,
        )


@dataclass
class RgdConfig:
    """Fixed-step solver knobs: step size, budget, and stopping rule.

    Stops when the Riemannian gradient norm drops to ``grad_tol`` or the
    objective reaches ``target_value`` (when given), whichever comes first.
    ``grad_tol = 0`` disables gradient stopping entirely.
    """

    step_size: float
    max_iters: int = 1000
    grad_tol: float = 1e-8
    target_value: Optional[float] = None

    def __post_init__(self):
        if self.step_size <= 0:
            raise ValueError("step_size must be positive")
        if self.max_iters < 1:
            raise ValueError("max_iters must be at least 1")
        if self.grad_tol < 0:
            raise ValueError("grad_tol must be nonnegative")


@dataclass
class PrgdConfig(RgdConfig):
    """Perturbed RGD knobs on top of :class:`RgdConfig`.

    ``None`` fields are resolved at solve time: threshold = 10 * grad_tol,
    radius = threshold, tangent step = step_size, escape radius =
    sqrt(threshold / hessian_lipschitz) with a unit default curvature
    constant.  These defaults were tuned on the strict-saddle test problem
    and carry no general guarantee.  ``perturb_radius = 0`` disables the
    perturbation entirely, reducing the method to plain RGD.
    """

    perturb_threshold: Optional[float] = None
    perturb_radius: Optional[float] = None
    tangent_step: Optional[float] = None
    escape_radius: Optional[float] = None
    tangent_iters: int = 200
    hessian_lipschitz: Optional[float] = None

    def __post_init__(self):
        super().__post_init__()
        if self.tangent_iters < 1:
            raise ValueError("tangent_iters must be at least 1")
        for name in ("perturb_threshold", "tangent_step", "escape_radius", "hessian_lipschitz"):
            v = getattr(self, name)
            if v is not None and v <= 0:
                raise ValueError(f"{name} must be positive")
        if self.perturb_radius is not None and self.perturb_radius < 0:
            raise ValueError("perturb_radius must be nonnegative (0 disables perturbation)")

    def resolved(self) -> "PrgdConfig":
        eps = self.perturb_threshold if self.perturb_threshold is not None else 10.0 * max(self.grad_tol, 1e-12)
        r = self.perturb_radius if self.perturb_radius is not None else eps
        eta = self.tangent_step if self.tangent_step is not None else self.step_size
        rho = self.hessian_lipschitz if self.hessian_lipschitz is not None else 1.0
        b = self.escape_radius if self.escape_radius is not None else float(np.sqrt(eps / rho))
        return PrgdConfig(
            step_size=self.step_size,
            max_iters=self.max_iters,
            grad_tol=self.grad_tol,
            target_value=self.target_value,
            perturb_threshold=eps,
            perturb_radius=r,
            tangent_step=eta,
            escape_radius=b,
            tangent_iters=self.tangent_iters,
            hessian_lipschitz=rho,
        )


@dataclass
class AwConfig:
    """Backtracking geodesic search accepting on Armijo or Wolfe.

    ``strict_wolfe=True`` demands both conditions instead of either.  Table
    defaults for the least-squares benchmarks come from
    :meth:`for_least_squares`.
    """

    default_step: float
    decay: float = 0.75
    armijo: float = 1e-4
    wolfe: float = 0.9
    max_backtracks: int = 25
    max_iters: int = 1000
    grad_tol: float = 1e-8
    target_value: Optional[float] = None
    strict_wolfe: bool = False

    def __post_init__(self):
        if self.default_step <= 0:
            raise ValueError("default_step must be positive")
        if not 0.0 < self.decay < 1.0:
            raise ValueError("decay must lie in (0, 1)")
        if not 0.0 < self.armijo < self.wolfe < 1.0:
            raise ValueError("need 0 < armijo < wolfe < 1")
        if self.max_backtracks < 0 or self.max_iters < 1:
            raise ValueError("max_backtracks must be >= 0 and max_iters >= 1")

    @classmethod
    def for_least_squares(cls, n: int, L: float, boundary: bool = False, **kw) -> "AwConfig":
        """Benchmark defaults: default_step = 10 sqrt(20 n / L) for interior
        ground truth, 10 sqrt(2 n / L) for boundary."""
        factor = 2.0 if boundary else 20.0
        return cls(default_step=10.0 * float(np.sqrt(factor * n / L)), **kw)


@dataclass
class BbConfig:
    """Barzilai-Borwein steps with the Zhang-Hager nonmonotone guard.

    ``average_weight`` is the running-average factor of the guard reference
    ``C_k``; ``tolerance`` the sufficient-decrease coefficient; trial steps
    clamp to ``clamp`` and shrink by ``decay`` until accepted (at most
    ``max_shrinks`` times, after which the last trial is taken and the
    failure recorded).
    """

    default_step: float = 3.0
    decay: float = 0.5
    average_weight: float = 0.5
    tolerance: float = 0.1
    clamp: tuple = (1e-10, 30.0)
    max_iters: int = 1000
    grad_tol: float = 1e-8
    target_value: Optional[float] = None
    max_shrinks: int = 50

    def __post_init__(self):
        if self.default_step <= 0:
            raise ValueError("default_step must be positive")
        if not 0.0 < self.decay < 1.0 or not 0.0 < self.average_weight < 1.0:
            raise ValueError("decay and average_weight must lie in (0, 1)")
        if self.tolerance <= 0:
            raise ValueError("tolerance must be positive")
        lo, hi = self.clamp
        if not lo < hi:
            raise ValueError("clamp lower bound must be below the upper bound")
        if self.max_iters < 1 or self.max_shrinks < 1:
            raise ValueError("max_iters and max_shrinks must be at least 1")

    @classmethod
    def for_least_squares(cls, n: int, L: float, boundary: bool = False, **kw) -> "BbConfig":
        """Benchmark defaults: (3.0, decay 0.5) for interior ground truth,
        (10 sqrt(2 n / L), decay 0.75) for boundary."""
        if boundary:
            kw.setdefault("decay", 0.75)
            return cls(default_step=10.0 * float(np.sqrt(2.0 * n / L)), **kw)
        return cls(default_step=3.0, **kw)


def _coords(x0) -> Array:
    if isinstance(x0, SimplexPoint):
        return x0.coords
    return SimplexPoint(np.asarray(x0, dtype=float)).coords


def _start_z(x0) -> Array:
    z = hadamard_sqrt(_coords(x0))
    return z / np.linalg.norm(z)

def _stopped(fz: float, gn: float, cfg) -> bool:
    # grad_tol = 0 disables gradient stopping (the gradient can underflow to
    # an exact 0.0 at a stationary point, which would otherwise count).
    if cfg.grad_tol > 0.0 and gn <= cfg.grad_tol:
        return True
    return cfg.target_value is not None and fz <= cfg.target_value


def _finish(x_from_z: bool, z: Array, trace: RunTrace):
    if x_from_z:
        return SimplexPoint(z * z), trace
    return z, trace


def uniform_tangent_ball(rng: np.random.Generator, z: Array, radius: float) -> Array:
    """Uniform draw from the ball of given radius in the tangent space at ``z``.

    An ambient Gaussian projected to the tangent space gives the direction;
    scaling by ``radius * u**(1/(n-1))`` with uniform ``u`` gives the exact
    uniform law on the (n-1)-dimensional tangent disc.
    """
    n = z.shape[0]
    w = rng.standard_normal(n)
    w -= np.dot(w, z) * z
    u = rng.uniform()
    nw = float(np.linalg.norm(w))
    if radius == 0.0 or nw == 0.0:
        return np.zeros_like(z)
    return (radius * u ** (1.0 / (n - 1)) / nw) * w


def _rgd_sphere(g, z0: Array, cfg: RgdConfig):
    tr = _TraceBuilder()
    z = z0
    fz = g.value(z)
    grad = riemannian_gradient(g.gradient, z)
    gn = float(np.linalg.norm(grad))
    tr.add(0, fz, gn, 0.0, 0)
    k = 0
    status = Status.MAX_ITERS
    while k < cfg.max_iters:
        if _stopped(fz, gn, cfg):
            status = Status.CONVERGED
            break
        k += 1
        z = exp_map(z, -cfg.step_size * grad)
        fz = g.value(z)
        grad = riemannian_gradient(g.gradient, z)
        gn = float(np.linalg.norm(grad))
        tr.add(k, fz, gn, cfg.step_size, 0)
    else:
        if _stopped(fz, gn, cfg):
            status = Status.CONVERGED
    return z, tr.build(status, z)


def had_rgd(f: Objective, x0, cfg: RgdConfig):
    """Fixed-step Riemannian gradient descent on the pullback objective.

    Iterates ``z_{k+1} = exp(z_k, -step * grad)`` from ``z_0 = sqrt(x0)`` and
    returns ``(SimplexPoint(z * z), RunTrace)``.
    """
    g = PullbackObjective(f)
    z, trace = _rgd_sphere(g, _start_z(x0), cfg)
    return _finish(True, z, trace)


def _tangent_episode(g, z: Array, s0: Array, eta: float, b: float, T: int, final_scale: float):
    """Gradient steps on the tangent pullback; returns (new point, steps used).

    Runs ``s <- s - eta * grad`` for up to ``T`` steps; once the iterate
    leaves the ball of radius ``b`` the last step is rescaled by
    ``final_scale`` and the episode ends.  The result returns to the sphere
    through the exponential map of the (re-projected) tangent vector.
    """
    s = np.asarray(s0, dtype=float)
    used = T
    for j in range(1, T + 1):
        grad_hat = tangent_pullback_gradient(g.gradient, z, s)
        s_next = s - eta * grad_hat
        if float(np.linalg.norm(s_next)) >= b:
            s = s - final_scale * eta * grad_hat
            used = j
            break
        s = s_next
    s -= np.dot(s, z) * z
    return exp_map(z, s), used


def tangent_space_steps(g, z: Array, s0: Array, cfg: PrgdConfig) -> Array:
    """Escape phase run standalone: returns the sphere point the episode ends at.

    ``g`` is a sphere objective (a :class:`PullbackObjective` or compatible);
    ``s0`` must be tangent at ``z``.
    """
    c = cfg.resolved()
    z = np.asarray(z, dtype=float)
    s0 = np.asarray(s0, dtype=float)
    if abs(float(np.dot(s0, z))) > 1e-8 * max(1.0, float(np.linalg.norm(s0))):
        raise ValueError("s0 is not tangent at z")
    out, _ = _tangent_episode(g, z, s0, c.tangent_step, c.escape_radius, c.tangent_iters, c.step_size)
    return out


def had_prgd(f: Objective, x0, cfg: PrgdConfig, rng_seed: int = 0):
    """Perturbed RGD: plain descent while the gradient is above the
    perturbation threshold, tangent-space escape episodes below it.

    Each episode draws a uniform tangent perturbation (seeded by
    ``rng_seed``), scales it by the tangent step and runs
    :func:`tangent_space_steps`; the iteration counter advances by the number
    of tangent gradient steps actually taken.
    """
    g = PullbackObjective(f)
    c = cfg.resolved()
    rng = np.random.default_rng(rng_seed)
    tr = _TraceBuilder()
    z = _start_z(x0)
    fz = g.value(z)
    grad = riemannian_gradient(g.gradient, z)
    gn = float(np.linalg.norm(grad))
    tr.add(0, fz, gn, 0.0, 0)
    k = 0
    status = Status.MAX_ITERS
    while k < c.max_iters:
        if _stopped(fz, gn, c):
            status = Status.CONVERGED
            break
        if gn > c.perturb_threshold or c.perturb_radius == 0.0:
            k += 1
            z = exp_map(z, -c.step_size * grad)
            step = c.step_size
        else:
            xi = uniform_tangent_ball(rng, z, c.perturb_radius)
            z, used = _tangent_episode(
                g, z, c.tangent_step * xi, c.tangent_step, c.escape_radius, c.tangent_iters, c.step_size
            )
            k += used
            step = c.tangent_step
        fz = g.value(z)
        grad = riemannian_gradient(g.gradient, z)
        gn = float(np.linalg.norm(grad))
        tr.add(k, fz, gn, step, 0)
    else:
        if _stopped(fz, gn, c):
            status = Status.CONVERGED
    return _finish(True, z, tr.build(status, z))


def _aw_sphere(g, z0: Array, cfg: AwConfig):
    tr = _TraceBuilder()
    z = z0
    fz = g.value(z)
    grad = riemannian_gradient(g.gradient, z)
    gn = float(np.linalg.norm(grad))
    tr.add(0, fz, gn, 0.0, 0)
    k = 0
    status = Status.MAX_ITERS
    last_failed = False
    while k < cfg.max_iters:
        if _stopped(fz, gn, cfg):
            status = Status.CONVERGED
            break
        v = -grad
        slope = -gn * gn  # <grad, v> along the geodesic at alpha = 0
        alpha = cfg.default_step
        accepted = False
        m = 0
        for m in range(cfg.max_backtracks + 1):
            alpha = cfg.default_step * cfg.decay**m
            y, ydot = sphere_geodesic(z, v, alpha)
            armijo_ok = g.value(y) <= fz + cfg.armijo * alpha * slope
            wolfe_ok = float(np.dot(g.gradient(y), ydot)) >= cfg.wolfe * slope
            ok = (armijo_ok and wolfe_ok) if cfg.strict_wolfe else (armijo_ok or wolfe_ok)
            if ok:
                accepted = True
                break
        last_failed = not accepted
        backtracks = m if accepted else cfg.max_backtracks + 1
        k += 1
        z = exp_map(z, alpha * v)  # on failure this is the last trial step
        fz = g.value(z)
        grad = riemannian_gradient(g.gradient, z)
        gn = float(np.linalg.norm(grad))
        tr.add(k, fz, gn, alpha, backtracks)
    else:
        if _stopped(fz, gn, cfg):
            status = Status.CONVERGED
    if status is Status.MAX_ITERS and last_failed:
        status = Status.LINE_SEARCH_FAILED
    return z, tr.build(status, z)


def had_rgd_aw(f: Objective, x0, cfg: AwConfig):
    """Geodesic backtracking RGD accepting on an Armijo or a Wolfe condition.

    Trial steps are ``default_step * decay**m`` for ``m = 0..max_backtracks``
    along the geodesic in direction ``-grad``; the curvature condition uses
    the exact directional derivative ``<grad g(y), y'(alpha)>``.  A failed
    search takes the last trial step and is recorded in the trace.
    """
    g = PullbackObjective(f)
    z, trace = _aw_sphere(g, _start_z(x0), cfg)
    return _finish(True, z, trace)


def _bb_sphere(g, z0: Array, cfg: BbConfig):
    tr = _TraceBuilder()
    lo, hi = cfg.clamp
    z = z0
    fz = g.value(z)
    grad = riemannian_gradient(g.gradient, z)
    gn = float(np.linalg.norm(grad))
    tr.add(0, fz, gn, 0.0, 0)
    alpha = cfg.default_step
    Q = 1.0
    C = fz  # Zhang-Hager running average starts at g(z_0)
    k = 0
    status = Status.MAX_ITERS
    last_failed = False
    while k < cfg.max_iters:
        if _stopped(fz, gn, cfg):
            status = Status.CONVERGED
            break
        shrinks = 0
        while True:
            z_new = exp_map(z, -alpha * grad)
            f_new = g.value(z_new)
            if f_new < C - cfg.tolerance * alpha * gn * gn:
                last_failed = False
                break
            if shrinks >= cfg.max_shrinks:
                last_failed = True
                break
            alpha *= cfg.decay
            shrinks += 1
        grad_new = riemannian_gradient(g.gradient, z_new)
        s = z_new - z
        yk = grad_new - grad
        sy = abs(float(np.dot(s, yk)))
        if sy < 1e-30:
            alpha_next = hi  # flat along s: take the largest allowed step
        else:
            alpha_next = min(max(float(np.dot(s, s)) / sy, lo), hi)
        Q_next = cfg.average_weight * Q + 1.0
        C = (cfg.average_weight * Q * C + f_new) / Q_next
        Q = Q_next
        z, fz, grad = z_new, f_new, grad_new
        gn = float(np.linalg.norm(grad))
        k += 1
        tr.add(k, fz, gn, alpha, shrinks)
        alpha = alpha_next
    else:
        if _stopped(fz, gn, cfg):
            status = Status.CONVERGED
    if status is Status.MAX_ITERS and last_failed:
        status = Status.LINE_SEARCH_FAILED
    return z, tr.build(status, z)


def had_rgd_bb(f: Objective, x0, cfg: BbConfig = BbConfig()):
    """Nonmonotone Barzilai-Borwein RGD.

    Shrinks the trial step by ``decay`` until
    ``g(exp(z, -alpha * grad)) < C_k - tolerance * alpha * ||grad||^2`` where
    ``C_k`` is the Zhang-Hager running average, then refreshes the trial step
    with the spectral ratio ``||s||^2 / |<s, y>|`` clamped to ``clamp``.
    """
    g = PullbackObjective(f)
    z, trace = _bb_sphere(g, _start_z(x0), cfg)
    return _finish(True, z, trace)


def had_rgd_bb_sphere(g, z0: Array, cfg: BbConfig = BbConfig()):
    """BB solver run directly on a sphere objective (no simplex mapping).

    Used by the signed parametrization, where ``g`` lives on the sphere in
    2n variables; returns ``(z, RunTrace)``.
    """
    z0 = np.asarray(z0, dtype=float)
    z0 = z0 / np.linalg.norm(z0)
    return _bb_sphere(g, z0, cfg)
