"""Numerical stationarity certificates for simplex- and sphere-constrained problems.

Each check recovers the Lagrange multipliers by least squares on the active
support, reports first-order residuals, and classifies the point through the
sign of the smallest curvature of the Lagrangian Hessian on the critical
cone:

- ``NotStationary``: feasibility or first-order residual above tolerance.
- ``SecondOrderKKT``: first-order point, cone curvature >= -tol.
- ``StrictSaddle``: first-order point with curvature < -tol (the two are
  mutually exclusive by construction).
- ``NonDegenerate``: second-order with strict curvature and strict
  complementary slackness, an isolated local minimum.

The exact conditions are exact-zero statements; every threshold here
(support cut, residual tolerance, curvature margin) is an engineering choice
and is echoed in the report so borderline calls are auditable.  Curvature
uses a dense eigendecomposition on cones of dimension up to 200 and a
matrix-free shifted power iteration beyond.

The extended checks cover the unit simplex (sum <= 1), the weighted simplex
``<a, x> = 1``, the unit 1-norm ball, and their sphere/ball counterparts
under the Hadamard square map.  The standard simplex and sphere checks are
the ``a = 1`` specializations of the weighted code path, so the weighted
checker with unit weights reproduces them bitwise.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass
from typing import Callable, Optional, Tuple

import numpy as np

from .geometry import (
    Geometry,
    GeometryKind,
    min_hessian_eig,
    orthonormal_complement,
    projected_min_eig,
    riemannian_gradient,
)
from .hadamard import DoublePullbackObjective, Objective

Array = np.ndarray

__all__ = [
    "Verdict",
    "KktReport",
    "CorrespondenceError",
    "KKT_REPORT_SCHEMA",
    "kkt_check_simplex",
    "kkt_check_sphere",
    "kkt_check_extended",
    "epsilon_sosp_check",
    "verify_correspondence",
]

SUPPORT_TOL = 1e-8
_DENSE_CONE_LIMIT = 200


class Verdict(enum.Enum):
    NOT_STATIONARY = "NotStationary"
    FIRST_ORDER = "FirstOrderKKT"
    SECOND_ORDER = "SecondOrderKKT"
    STRICT_SADDLE = "StrictSaddle"
    NON_DEGENERATE = "NonDegenerate"


class CorrespondenceError(AssertionError):
    """Sphere-side and simplex-side verdicts disagreed where they must not."""

    def __init__(self, message: str, sphere_report=None, simplex_report=None):
        super().__init__(message)
        self.sphere_report = sphere_report
        self.simplex_report = simplex_report


@dataclass
class KktReport:
    """Outcome of one stationarity check; see the module docstring.

    ``multiplier`` is the scalar constraint multiplier (support mean of the
    gradient for the simplex, the radial component for sphere checks);
    ``multiplier_vector`` carries the nonnegativity multipliers of
    original-side checks.  ``min_curvature`` is None when the point failed
    first-order checks or the critical cone is zero-dimensional (vacuous
    second-order condition).
    """

    problem: str
    side: str
    verdict: Verdict
    first_order: bool
    second_order: Optional[bool]
    strict_saddle: Optional[bool]
    non_degenerate: Optional[bool]
    stationarity_residual: float
    feasibility_residual: float
    complementarity_residual: float
    multiplier: float
    multiplier_vector: Optional[Array]
    min_curvature: Optional[float]
    curvature_direction: Optional[Array]
    cone_dim: Optional[int]
    support: Optional[Array]
    tolerances: dict

    def to_dict(self) -> dict:
        def _arr(a):
            return None if a is None else np.asarray(a).tolist()

        return {
            "problem": self.problem,
            "side": self.side,
            "verdict": self.verdict.value,
            "first_order": self.first_order,
            "second_order": self.second_order,
            "strict_saddle": self.strict_saddle,
            "non_degenerate": self.non_degenerate,
            "stationarity_residual": self.stationarity_residual,
            "feasibility_residual": self.feasibility_residual,
            "complementarity_residual": self.complementarity_residual,
            "multiplier": self.multiplier,
            "multiplier_vector": _arr(self.multiplier_vector),
            "min_curvature": self.min_curvature,
            "curvature_direction": _arr(self.curvature_direction),
            "cone_dim": self.cone_dim,
            "support": _arr(self.support),
            "tolerances": dict(self.tolerances),
        }

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)


KKT_REPORT_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "KktReport",
    "description": "Stationarity certificate. All residual thresholds are "
    "engineering choices (the underlying optimality conditions are "
    "exact-zero statements) and are echoed in 'tolerances'.",
    "type": "object",
    "required": [
        "problem",
        "side",
        "verdict",
        "first_order",
        "stationarity_residual",
        "feasibility_residual",
        "complementarity_residual",
        "multiplier",
        "tolerances",
    ],
    "properties": {
        "problem": {"type": "string"},
        "side": {"type": "string", "enum": ["original", "parametrized"]},
        "verdict": {
            "type": "string",
            "enum": [v.value for v in Verdict],
        },
        "first_order": {"type": "boolean"},
        "second_order": {"type": ["boolean", "null"]},
        "strict_saddle": {"type": ["boolean", "null"]},
        "non_degenerate": {"type": ["boolean", "null"]},
        "stationarity_residual": {"type": "number"},
        "feasibility_residual": {"type": "number"},
        "complementarity_residual": {"type": "number"},
        "multiplier": {"type": "number"},
        "multiplier_vector": {"type": ["array", "null"], "items": {"type": "number"}},
        "min_curvature": {"type": ["number", "null"]},
        "curvature_direction": {"type": ["array", "null"], "items": {"type": "number"}},
        "cone_dim": {"type": ["integer", "null"]},
        "support": {"type": ["array", "null"], "items": {"type": "integer"}},
        "tolerances": {"type": "object"},
    },
}


def _embedded_complement_basis(c_sup: Array, support: Array, n: int) -> Array:
    """Basis of {u : supp(u) in support, <c_sup, u_sup> = 0} in ambient coordinates."""
    b_sup = orthonormal_complement(c_sup)
    basis = np.zeros((n, b_sup.shape[1]))
    basis[support, :] = b_sup
    return basis


def _min_curvature(
    apply_h: Callable[[Array], Array],
    dim: int,
    cone_dim: int,
    eig_tol: float,
    basis: Optional[Array] = None,
    project: Optional[Callable[[Array], Array]] = None,
) -> Tuple[Optional[float], Optional[Array]]:
    """Smallest curvature of ``apply_h`` on the cone; (None, None) if vacuous.

    ``basis`` (ambient x cone_dim, orthonormal) drives the dense path;
    ``project`` the power-iteration path for larger cones.
    """
    if cone_dim == 0:
        return None, None
    if basis is not None and cone_dim <= _DENSE_CONE_LIMIT:
        cols = np.column_stack([apply_h(basis[:, j]) for j in range(basis.shape[1])])
        m = basis.T @ cols
        m = 0.5 * (m + m.T)
        w, v = np.linalg.eigh(m)
        return float(w[0]), basis @ v[:, 0]
    if project is None:
        raise ValueError("need a projector for the matrix-free curvature path")
    lam = projected_min_eig(apply_h, project, dim, tol=eig_tol)
    return float(lam), None


def _classify(
    first_order: bool,
    min_curv: Optional[float],
    cone_dim: int,
    strict_complementarity: bool,
    tol: float,
):
    if not first_order:
        return Verdict.NOT_STATIONARY, None, None, None
    vacuous = cone_dim == 0
    second = vacuous or min_curv >= -tol
    saddle = not second
    strict_curv = vacuous or min_curv > tol
    nondeg = second and strict_curv and strict_complementarity
    verdict = Verdict.NON_DEGENERATE if nondeg else (Verdict.SECOND_ORDER if second else Verdict.STRICT_SADDLE)
    return verdict, second, saddle, nondeg


def _tolerances(tol: float) -> dict:
    return {"tol": tol, "support_tol": SUPPORT_TOL, "eig_tol": max(tol / 10.0, 1e-12)}


def _original_check(
    f: Objective,
    x: Array,
    weights: Array,
    inequality: bool,
    label: str,
    tol: float,
) -> KktReport:
    """First/second-order system of min f over {x >= 0, <a, x> = 1} (or <= 1).

    Gradient splits as ``grad f = lam * a + beta`` with ``beta = 0`` on the
    support and ``beta >= 0`` off it; the inequality variant adds
    ``lam <= 0`` and ``lam * (<a, x> - 1) = 0``.  Curvature is tested on the
    subspace part of the critical cone: vectors supported on the active
    support, orthogonal to ``a`` there when the sum constraint is active.
    """
    x = np.asarray(x, dtype=float)
    n = x.shape[0]
    a = np.asarray(weights, dtype=float)
    tols = _tolerances(tol)
    g = f.gradient(x)
    total = float(np.dot(a, x))
    feas_sum = max(0.0, total - 1.0) if inequality else abs(total - 1.0)
    feas = max(feas_sum, max(0.0, -float(np.min(x))))
    support = np.nonzero(x > SUPPORT_TOL)[0]
    off = np.nonzero(x <= SUPPORT_TOL)[0]
    active = (not inequality) or total >= 1.0 - SUPPORT_TOL

    if support.size == 0:
        return KktReport(
            label, "original", Verdict.NOT_STATIONARY, False, None, None, None,
            np.inf, feas, np.inf, np.nan, None, None, None, None, None, tols,
        )

    if active:
        a_sup = a[support]
        lam = float(np.dot(g[support], a_sup) / np.dot(a_sup, a_sup))
    else:
        lam = 0.0
    beta = g - lam * a
    stat_sup = float(np.max(np.abs(beta[support])))
    stat_off = float(max(0.0, np.max(-beta[off]))) if off.size else 0.0
    stationarity = max(stat_sup, stat_off)
    sign_violation = max(0.0, lam) if (inequality and active) else 0.0
    comp = float(np.max(np.abs(x * beta)))
    if inequality:
        comp = max(comp, abs(lam * (total - 1.0)))
    first_order = feas <= tol and stationarity <= tol and sign_violation <= tol

    min_curv = None
    direction = None
    cone_dim = None
    strict_comp = bool(np.all(beta[off] > tol)) if off.size else True
    if inequality:
        if active:
            strict_comp = strict_comp and lam < -tol
        else:
            strict_comp = strict_comp and total < 1.0 - tol
    if first_order:
        if active:
            cone_dim = int(support.size - 1)
            basis = (
                _embedded_complement_basis(a[support], support, n)
                if cone_dim and cone_dim <= _DENSE_CONE_LIMIT
                else None
            )
            a_sup = a[support]
            denom = float(np.dot(a_sup, a_sup))

            def _project(u, s=support, asup=a_sup, dn=denom):
                v = np.zeros_like(u)
                v[s] = u[s]
                v[s] -= (np.dot(v[s], asup) / dn) * asup
                return v

        else:
            cone_dim = int(support.size)
            basis = None
            if cone_dim <= _DENSE_CONE_LIMIT:
                basis = np.zeros((n, cone_dim))
                basis[support, np.arange(cone_dim)] = 1.0

            def _project(u, s=support):
                v = np.zeros_like(u)
                v[s] = u[s]
                return v

        min_curv, direction = _min_curvature(
            lambda d: f.hessian_vec_or_fd(x, d), n, cone_dim, tols["eig_tol"], basis, _project
        )
    verdict, second, saddle, nondeg = _classify(
        first_order, min_curv, cone_dim if cone_dim is not None else -1, strict_comp, tol
    )
    return KktReport(
        label, "original", verdict, first_order, second, saddle, nondeg,
        stationarity, feas, comp, lam, beta, min_curv, direction, cone_dim,
        support, tols,
    )


def _lagrangian_hessian_vec(f: Objective, z: Array, lam: float, a: Array):
    """Matrix-free sphere-side Lagrangian Hessian: the Hessian of
    ``f(z * z) - lam * (<a * z, z> - 1)``."""

    x = z * z
    g = f.gradient(x)

    def _apply(d: Array) -> Array:
        return 2.0 * g * d - 2.0 * lam * (a * d) + 4.0 * z * f.hessian_vec_or_fd(x, z * d)

    return _apply


def _param_equality_check(f: Objective, z: Array, weights: Array, label: str, tol: float) -> KktReport:
    """Parametrized check on the (weighted) sphere ``<a * z, z> = 1``.

    Stationarity: ``grad f(z*z) * z = lam * a * z``; curvature: smallest
    eigenvalue of the Lagrangian Hessian on the tangent space
    ``{d : <d, a * z> = 0}``.
    """
    z = np.asarray(z, dtype=float)
    n = z.shape[0]
    a = np.asarray(weights, dtype=float)
    tols = _tolerances(tol)
    g = f.gradient(z * z)
    az = a * z
    gz = g * z
    denom = float(np.dot(az, az))
    feas = abs(float(np.dot(az, z)) - 1.0)
    lam = float(np.dot(gz, az) / denom)
    stationarity = float(np.linalg.norm(gz - lam * az))
    first_order = feas <= tol and stationarity <= tol

    min_curv = None
    direction = None
    cone_dim = None
    if first_order:
        cone_dim = n - 1
        basis = orthonormal_complement(az) if cone_dim <= _DENSE_CONE_LIMIT else None

        def _project(u, w=az, dn=denom):
            return u - (np.dot(u, w) / dn) * w

        min_curv, direction = _min_curvature(
            _lagrangian_hessian_vec(f, z, lam, a), n, cone_dim, tols["eig_tol"], basis, _project
        )
    verdict, second, saddle, nondeg = _classify(
        first_order, min_curv, cone_dim if cone_dim is not None else -1, True, tol
    )
    support = np.nonzero(z * z > SUPPORT_TOL)[0]
    return KktReport(
        label, "parametrized", verdict, first_order, second, saddle, nondeg,
        stationarity, feas, 0.0, lam, None, min_curv, direction, cone_dim,
        support, tols,
    )


def _param_ball_check(f: Objective, z: Array, label: str, tol: float) -> KktReport:
    """Parametrized check on the unit ball ``||z||^2 <= 1`` (unit-simplex image).

    Adds the sign condition ``lam <= 0`` and complementarity
    ``lam * (||z||^2 - 1) = 0``; the critical cone is all of R^n at interior
    points and the tangent hyperplane on the boundary.
    """
    z = np.asarray(z, dtype=float)
    n = z.shape[0]
    tols = _tolerances(tol)
    g = f.gradient(z * z)
    gz = g * z
    nz2 = float(np.dot(z, z))
    feas = max(0.0, nz2 - 1.0)
    interior = nz2 < 1.0 - SUPPORT_TOL
    if interior:
        lam = 0.0
        stationarity = float(np.linalg.norm(gz))
        sign_violation = 0.0
        comp = 0.0
    else:
        lam = float(np.dot(gz, z) / nz2)
        stationarity = float(np.linalg.norm(gz - lam * z))
        sign_violation = max(0.0, lam)
        comp = abs(lam * (nz2 - 1.0))
    first_order = feas <= tol and stationarity <= tol and sign_violation <= tol

    min_curv = None
    direction = None
    cone_dim = None
    strict_comp = (nz2 < 1.0 - tol) if interior else (lam < -tol)
    if first_order:
        ones = np.ones(n)
        apply_h = _lagrangian_hessian_vec(f, z, lam, ones)
        if interior:
            cone_dim = n
            basis = np.eye(n) if n <= _DENSE_CONE_LIMIT else None
            min_curv, direction = _min_curvature(
                apply_h, n, cone_dim, tols["eig_tol"], basis, lambda u: u
            )
        else:
            cone_dim = n - 1
            basis = orthonormal_complement(z) if cone_dim <= _DENSE_CONE_LIMIT else None

            def _project(u, w=z, dn=nz2):
                return u - (np.dot(u, w) / dn) * w

            min_curv, direction = _min_curvature(apply_h, n, cone_dim, tols["eig_tol"], basis, _project)
    verdict, second, saddle, nondeg = _classify(
        first_order, min_curv, cone_dim if cone_dim is not None else -1, strict_comp, tol
    )
    support = np.nonzero(z * z > SUPPORT_TOL)[0]
    return KktReport(
        label, "parametrized", verdict, first_order, second, saddle, nondeg,
        stationarity, feas, comp, lam, None, min_curv, direction, cone_dim,
        support, tols,
    )


def _param_double_check(f: Objective, w: Array, label: str, tol: float) -> KktReport:
    """Parametrized 1-norm-ball check through the signed square map.

    ``w = (z_u, z_v)`` on the unit ball in 2n variables represents
    ``x = z_u^2 - z_v^2`` with ``||x||_1 <= 1``.  Stationarity is
    ``grad G(w) = 2 lam w`` for the signed pullback ``G``, with ``lam <= 0``
    and ball complementarity; curvature uses the block Lagrangian Hessian
    ``hess G(w) - 2 lam I`` matrix-free on the critical cone.
    """
    w = np.asarray(w, dtype=float)
    n2 = w.shape[0]
    tols = _tolerances(tol)
    G = DoublePullbackObjective(f)
    if n2 != G.dim:
        raise ValueError(f"point has dimension {n2}, expected {G.dim}")
    gg = 0.5 * G.gradient(w)
    nz2 = float(np.dot(w, w))
    feas = max(0.0, nz2 - 1.0)
    interior = nz2 < 1.0 - SUPPORT_TOL
    if interior:
        lam = 0.0
        stationarity = float(np.linalg.norm(gg))
        sign_violation = 0.0
        comp = 0.0
    else:
        lam = float(np.dot(gg, w) / nz2)
        stationarity = float(np.linalg.norm(gg - lam * w))
        sign_violation = max(0.0, lam)
        comp = abs(lam * (nz2 - 1.0))
    first_order = feas <= tol and stationarity <= tol and sign_violation <= tol

    def _apply(d: Array) -> Array:
        return G.hessian_vec_or_fd(w, d) - 2.0 * lam * d

    min_curv = None
    direction = None
    cone_dim = None
    strict_comp = (nz2 < 1.0 - tol) if interior else (lam < -tol)
    if first_order:
        if interior:
            cone_dim = n2
            basis = np.eye(n2) if n2 <= _DENSE_CONE_LIMIT else None
            min_curv, direction = _min_curvature(_apply, n2, cone_dim, tols["eig_tol"], basis, lambda u: u)
        else:
            cone_dim = n2 - 1
            basis = orthonormal_complement(w) if cone_dim <= _DENSE_CONE_LIMIT else None

            def _project(u, v=w, dn=nz2):
                return u - (np.dot(u, v) / dn) * v

            min_curv, direction = _min_curvature(_apply, n2, cone_dim, tols["eig_tol"], basis, _project)
    verdict, second, saddle, nondeg = _classify(
        first_order, min_curv, cone_dim if cone_dim is not None else -1, strict_comp, tol
    )
    support = np.nonzero(w * w > SUPPORT_TOL)[0]
    return KktReport(
        label, "parametrized", verdict, first_order, second, saddle, nondeg,
        stationarity, feas, comp, lam, None, min_curv, direction, cone_dim,
        support, tols,
    )


def _original_l1_check(f: Objective, x: Array, label: str, tol: float) -> KktReport:
    """Original-side check on the unit 1-norm ball.

    At a boundary solution the gradient is ``lam * sign(x)`` on the support
    with ``lam <= 0`` and ``|grad_j| <= -lam`` off it; interior solutions
    need a vanishing gradient.  Curvature is tested on the subspace part of
    the critical cone (sign-weighted zero-sum vectors on the support).
    """
    x = np.asarray(x, dtype=float)
    n = x.shape[0]
    tols = _tolerances(tol)
    g = f.gradient(x)
    l1 = float(np.sum(np.abs(x)))
    feas = max(0.0, l1 - 1.0)
    support = np.nonzero(np.abs(x) > SUPPORT_TOL)[0]
    off = np.nonzero(np.abs(x) <= SUPPORT_TOL)[0]
    active = l1 >= 1.0 - SUPPORT_TOL
    sgn = np.sign(x)
    if active and support.size:
        lam = float(np.dot(g[support], sgn[support]) / support.size)
    else:
        lam = 0.0
    stat_sup = float(np.max(np.abs(g[support] - lam * sgn[support]))) if support.size else 0.0
    stat_off = float(max(0.0, np.max(np.abs(g[off])) + lam)) if off.size else 0.0
    stationarity = max(stat_sup, stat_off)
    sign_violation = max(0.0, lam) if active else 0.0
    comp = abs(lam * (l1 - 1.0))
    first_order = feas <= tol and stationarity <= tol and sign_violation <= tol

    min_curv = None
    direction = None
    cone_dim = None
    strict_comp = lam < -tol if active else l1 < 1.0 - tol
    if off.size:
        strict_comp = strict_comp and bool(np.max(np.abs(g[off])) < -lam - tol)
    if first_order:
        if active and support.size > 0:
            cone_dim = int(support.size - 1)
            basis = (
                _embedded_complement_basis(sgn[support], support, n)
                if cone_dim and cone_dim <= _DENSE_CONE_LIMIT
                else None
            )
            s_sup = sgn[support]

            def _project(u, s=support, ss=s_sup):
                v = np.zeros_like(u)
                v[s] = u[s]
                v[s] -= (np.dot(v[s], ss) / ss.size) * ss
                return v

        else:
            cone_dim = n
            basis = np.eye(n) if n <= _DENSE_CONE_LIMIT else None

            def _project(u):
                return u

        min_curv, direction = _min_curvature(
            lambda d: f.hessian_vec_or_fd(x, d), n, cone_dim, tols["eig_tol"], basis, _project
        )
    verdict, second, saddle, nondeg = _classify(
        first_order, min_curv, cone_dim if cone_dim is not None else -1, strict_comp, tol
    )
    return KktReport(
        label, "original", verdict, first_order, second, saddle, nondeg,
        stationarity, feas, comp, lam, g - lam * sgn, min_curv, direction,
        cone_dim, support, tols,
    )


def kkt_check_simplex(f: Objective, x: Array, tol: float = 1e-6) -> KktReport:
    """Stationarity certificate for min f over the probability simplex.

    The multiplier is the support mean of the gradient; see the module
    docstring for the verdict taxonomy.  Infeasible points come back
    ``NotStationary`` with the feasibility residual set.
    """
    x = np.asarray(x, dtype=float)
    return _original_check(f, x, np.ones(x.shape[0]), inequality=False, label="simplex", tol=tol)


def kkt_check_sphere(f: Objective, z: Array, tol: float = 1e-6) -> KktReport:
    """Stationarity certificate for the sphere-parametrized problem at ``z``.

    Recovers the radial multiplier (half the inner product of the pullback
    gradient with ``z``), reports the residual of
    ``grad f(z*z) * z = lam * z``, and tests the Lagrangian-Hessian quadratic
    form on the tangent space.
    """
    z = np.asarray(z, dtype=float)
    return _param_equality_check(f, z, np.ones(z.shape[0]), label="sphere", tol=tol)


def kkt_check_extended(
    f: Objective,
    point: Array,
    geometry: Geometry,
    tol: float = 1e-6,
    side: str = "parametrized",
    f_convex: bool = False,
) -> KktReport:
    """Stationarity certificate for the extended constraint families.

    ``side="parametrized"`` reads ``point`` as the sphere/ball variable:
    Sphere and WeightedBall evaluate the (weighted) sphere system, Ball the
    unit-ball system with multiplier sign and complementarity, DoubleSphere
    the signed 2n-variable system for the 1-norm ball.  ``side="original"``
    reads ``point`` as the simplex-side variable of the matching constraint
    set (standard/unit/weighted simplex, or the 1-norm ball for
    DoubleSphere).  The 1-norm cases require ``f_convex=True``; the
    second-order theory backing them assumes convexity.
    """
    point = np.asarray(point, dtype=float)
    if side not in ("original", "parametrized"):
        raise ValueError(f"side must be 'original' or 'parametrized', got {side!r}")
    kind = geometry.kind
    if kind is GeometryKind.DOUBLE_SPHERE and not f_convex:
        raise ValueError("the 1-norm-ball check requires f_convex=True")
    if side == "original":
        if kind is GeometryKind.SPHERE:
            return _original_check(f, point, np.ones(point.shape[0]), False, "simplex", tol)
        if kind is GeometryKind.BALL:
            return _original_check(f, point, np.ones(point.shape[0]), True, "unit-simplex", tol)
        if kind is GeometryKind.WEIGHTED_BALL:
            return _original_check(f, point, geometry.weights, False, "weighted-simplex", tol)
        return _original_l1_check(f, point, "l1-ball", tol)
    if kind is GeometryKind.SPHERE:
        return _param_equality_check(f, point, np.ones(point.shape[0]), "sphere", tol)
    if kind is GeometryKind.WEIGHTED_BALL:
        return _param_equality_check(f, point, geometry.weights, "weighted-ball", tol)
    if kind is GeometryKind.BALL:
        return _param_ball_check(f, point, "ball", tol)
    return _param_double_check(f, point, "l1-double", tol)


def epsilon_sosp_check(g, z: Array, eps: float, rho: float) -> bool:
    """Approximate second-order stationarity on the sphere.

    True iff ``||grad g(z)|| <= eps`` and the smallest Riemannian-Hessian
    eigenvalue is at least ``-sqrt(rho * eps)``, the eigenvalue computed
    matrix-free to tolerance ``sqrt(rho * eps) / 10``.
    """
    if eps <= 0 or rho <= 0:
        raise ValueError("eps and rho must be positive")
    z = np.asarray(z, dtype=float)
    grad = riemannian_gradient(g.gradient, z)
    if float(np.linalg.norm(grad)) > eps:
        return False
    bound = float(np.sqrt(rho * eps))
    lam = min_hessian_eig(g.gradient, g.hessian_vec_or_fd, z, tol=bound / 10.0)
    return lam >= -bound


def _second_orderish(v: Verdict) -> bool:
    return v in (Verdict.SECOND_ORDER, Verdict.NON_DEGENERATE)


def verify_correspondence(f: Objective, z: Array, tol: float = 1e-6):
    """Check that sphere-side and simplex-side verdicts at ``z`` agree.

    Runs ``kkt_check_sphere`` at ``z`` and ``kkt_check_simplex`` at
    ``x = z * z`` and demands second-order verdicts coincide and strict
    saddles coincide.  For ``n <= 12`` every one of the 2^n sign flips of
    ``z`` must give the same sphere verdict (the squared point is sign
    blind).  Raises :class:`CorrespondenceError` on any disagreement;
    returns ``(sphere_report, simplex_report)``.
    """
    z = np.asarray(z, dtype=float)
    rs = kkt_check_sphere(f, z, tol)
    rx = kkt_check_simplex(f, z * z, tol)
    if _second_orderish(rs.verdict) != _second_orderish(rx.verdict) or (
        (rs.verdict is Verdict.STRICT_SADDLE) != (rx.verdict is Verdict.STRICT_SADDLE)
    ):
        raise CorrespondenceError(
            "sphere/simplex verdict mismatch: "
            f"sphere={rs.verdict.value} (stationarity {rs.stationarity_residual:.3e}, "
            f"curvature {rs.min_curvature}), "
            f"simplex={rx.verdict.value} (stationarity {rx.stationarity_residual:.3e}, "
            f"curvature {rx.min_curvature})",
            rs,
            rx,
        )
    n = z.shape[0]
    if n <= 12:
        for bits in range(1, 2**n):
            signs = np.where((bits >> np.arange(n)) & 1, -1.0, 1.0)
            flipped = kkt_check_sphere(f, signs * z, tol)
            if flipped.verdict is not rs.verdict:
                raise CorrespondenceError(
                    f"sign flip {bits:0{n}b} changed the sphere verdict: "
                    f"{rs.verdict.value} -> {flipped.verdict.value}",
                    flipped,
                    rx,
                )
    return rs, rx
