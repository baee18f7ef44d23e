"""Geometry of the unit sphere and the ball-shaped feasible sets.

The solvers walk on the unit sphere; the extended constraint families add the
unit ball, the weighted ball ``sum(a * z^2) <= 1`` and the product sphere in
2n variables used by the signed parametrization.  Sphere steps use the exact
exponential map (great-circle geodesics); ball geometries use the metric
projection retraction ``z -> z / max(1, ||z||)``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

Array = np.ndarray

__all__ = [
    "GeometryKind",
    "Geometry",
    "SimplexPoint",
    "ManifoldPoint",
    "TangentVector",
    "PowerIterationError",
    "tangent_project",
    "exp_map",
    "retract",
    "sphere_geodesic",
    "tangent_pullback_gradient",
    "riemannian_gradient",
    "riemannian_hessian_vec",
    "min_hessian_eig",
    "projected_min_eig",
    "orthonormal_complement",
]

# Feasibility slack used by the point containers.
_SUM_TOL = 1e-10
_NEG_TOL = 1e-12
_ZERO_STEP = 1e-14


class GeometryKind(enum.Enum):
    SPHERE = "Sphere"
    BALL = "Ball"
    WEIGHTED_BALL = "WeightedBall"
    DOUBLE_SPHERE = "DoubleSphere"


@dataclass(frozen=True)
class Geometry:
    """A constraint manifold: kind, ambient dimension, optional weights.

    ``weights`` is required for ``WEIGHTED_BALL`` (entrywise positive) and
    rejected for the other kinds.  ``DOUBLE_SPHERE`` is the unit sphere in an
    even ambient dimension ``2n`` whose points are read as ``(z_u, z_v)``.
    """

    kind: GeometryKind
    dim: int
    weights: Optional[Array] = None

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError("geometry dimension must be positive")
        if self.kind is GeometryKind.WEIGHTED_BALL:
            if self.weights is None:
                raise ValueError("WeightedBall requires weights")
            w = np.asarray(self.weights, dtype=float)
            if w.shape != (self.dim,):
                raise ValueError(f"weights shape {w.shape} does not match dim {self.dim}")
            if np.any(w <= 0):
                raise ValueError("weights must be strictly positive")
            object.__setattr__(self, "weights", w)
        elif self.weights is not None:
            raise ValueError(f"{self.kind.value} does not take weights")
        if self.kind is GeometryKind.DOUBLE_SPHERE and self.dim % 2 != 0:
            raise ValueError("DoubleSphere needs an even ambient dimension")

    def norm(self, v: Array) -> float:
        """Ambient norm, weighted for WeightedBall."""
        if self.kind is GeometryKind.WEIGHTED_BALL:
            return float(np.sqrt(np.dot(self.weights * v, v)))
        return float(np.linalg.norm(v))

    def feasibility_residual(self, z: Array) -> float:
        """Constraint violation: 0 means feasible up to roundoff."""
        r = self.norm(z)
        if self.kind in (GeometryKind.SPHERE, GeometryKind.DOUBLE_SPHERE):
            return abs(r - 1.0)
        return max(0.0, r - 1.0)


def sphere(dim: int) -> Geometry:
    return Geometry(GeometryKind.SPHERE, dim)


@dataclass(frozen=True)
class SimplexPoint:
    """A point of the probability simplex, validated on construction.

    Entries may dip to ``-1e-12`` (roundoff from projections) and the total
    must match 1 to within ``1e-10``.
    """

    coords: Array

    def __post_init__(self):
        x = np.asarray(self.coords, dtype=float)
        if x.ndim != 1 or x.shape[0] < 1:
            raise ValueError("simplex point must be a nonempty 1-d array")
        if np.min(x) < -_NEG_TOL:
            raise ValueError(f"entry {np.min(x):.3e} below the -1e-12 feasibility slack")
        s = float(np.sum(x))
        if abs(s - 1.0) > _SUM_TOL:
            raise ValueError(f"coordinates sum to {s!r}, outside 1 +- 1e-10")
        object.__setattr__(self, "coords", x)

    @property
    def dim(self) -> int:
        return self.coords.shape[0]


@dataclass(frozen=True)
class ManifoldPoint:
    """A feasible point of a :class:`Geometry`, validated on construction."""

    geometry: Geometry
    coords: Array

    def __post_init__(self):
        z = np.asarray(self.coords, dtype=float)
        if z.shape != (self.geometry.dim,):
            raise ValueError(f"coords shape {z.shape} does not match geometry dim")
        r = self.geometry.norm(z)
        if self.geometry.kind in (GeometryKind.SPHERE, GeometryKind.DOUBLE_SPHERE):
            if abs(r - 1.0) > _SUM_TOL:
                raise ValueError(f"sphere point has norm {r!r}, outside 1 +- 1e-10")
        else:
            if r * r > 1.0 + _SUM_TOL:
                raise ValueError(f"ball point has squared norm {r * r!r} above 1 + 1e-10")
        object.__setattr__(self, "coords", z)


@dataclass(frozen=True)
class TangentVector:
    """A vector attached to a manifold point, checked for tangency."""

    point: ManifoldPoint
    coords: Array

    def __post_init__(self):
        v = np.asarray(self.coords, dtype=float)
        if v.shape != (self.point.geometry.dim,):
            raise ValueError("tangent coords shape does not match the base point")
        geom = self.point.geometry
        z = self.point.coords
        if geom.kind in (GeometryKind.SPHERE, GeometryKind.DOUBLE_SPHERE):
            inner = abs(float(np.dot(v, z)))
        elif geom.kind is GeometryKind.WEIGHTED_BALL and geom.norm(z) >= 1.0 - _SUM_TOL:
            inner = abs(float(np.dot(geom.weights * v, z)))
        elif geom.kind is GeometryKind.BALL and np.linalg.norm(z) >= 1.0 - _SUM_TOL:
            inner = abs(float(np.dot(v, z)))
        else:
            inner = 0.0  # interior of a ball: the tangent space is everything
        scale = max(1.0, float(np.linalg.norm(v)))
        if inner > _SUM_TOL * scale:
            raise ValueError(f"vector is not tangent: |<v, z>| = {inner:.3e}")
        object.__setattr__(self, "coords", v)


def tangent_project(geom: Geometry, z: Array, w: Array) -> Array:
    """Orthogonal projection of ``w`` onto the tangent space at ``z``.

    Sphere kinds remove the radial component ``(w . z) z``.  Ball kinds are
    the identity at interior points and sphere-like on the boundary; the
    weighted ball uses the ``diag(a)`` inner product throughout.
    """
    if geom.kind in (GeometryKind.SPHERE, GeometryKind.DOUBLE_SPHERE):
        return w - np.dot(w, z) * z
    if geom.kind is GeometryKind.BALL:
        nz = float(np.linalg.norm(z))
        if nz < 1.0 - _SUM_TOL:
            return np.asarray(w, dtype=float)
        return w - (np.dot(w, z) / (nz * nz)) * z
    # WeightedBall: project in the diag(a) metric onto {d : <d, z>_a = 0}.
    a = geom.weights
    ra = float(np.dot(a * z, z))
    if ra < (1.0 - _SUM_TOL) ** 2:
        return np.asarray(w, dtype=float)
    return w - (np.dot(a * w, z) / ra) * z


def exp_map(z: Array, v: Array, renormalize: bool = True) -> Array:
    """Exponential map on the unit sphere: follow the great circle from ``z``
    with initial velocity ``v`` (tangent at ``z``) for arc length ``||v||``.

    Steps shorter than 1e-14 return ``z`` unchanged; otherwise the result is
    renormalized to unit length to stop drift from accumulating.
    """
    nv = float(np.linalg.norm(v))
    if nv < _ZERO_STEP:
        return z
    y = np.cos(nv) * z + (np.sin(nv) / nv) * v
    if renormalize:
        y /= np.linalg.norm(y)
    return y


def retract(geom: Geometry, z: Array, v: Array) -> Array:
    """Move from ``z`` along ``v``: exact exponential on sphere kinds, metric
    projection ``(z + v) / max(1, ||z + v||)`` on ball kinds."""
    if geom.kind in (GeometryKind.SPHERE, GeometryKind.DOUBLE_SPHERE):
        return exp_map(z, v)
    y = z + v
    r = geom.norm(y)
    if r > 1.0:
        y = y / r
    return y


def sphere_geodesic(z: Array, v: Array, alpha: float):
    """Point and velocity of the great circle ``t -> exp_z(t v)`` at ``t = alpha``.

    Returns ``(y, ydot)`` with ``y = cos(a ||v||) z + sin(a ||v||) v / ||v||``
    and ``ydot = -sin(a ||v||) ||v|| z + cos(a ||v||) v``, the exact curve
    derivative used by directional-derivative line searches.
    """
    nv = float(np.linalg.norm(v))
    if nv < _ZERO_STEP:
        return z, np.array(v, dtype=float, copy=True)
    t = alpha * nv
    y = np.cos(t) * z + (np.sin(t) / nv) * v
    ydot = -np.sin(t) * nv * z + np.cos(t) * v
    return y, ydot


def tangent_pullback_gradient(gradient: Callable[[Array], Array], z: Array, s: Array) -> Array:
    """Gradient of ``s -> g(exp_z(s))`` on the tangent space at ``z``.

    ``gradient`` is the ambient gradient of ``g``.  This is the exact chain
    rule through the sphere exponential, used by the tangent-space escape
    phase; at ``s = 0`` it reduces to the Riemannian gradient at ``z``.
    """
    r = float(np.linalg.norm(s))
    gz = None
    if r < _ZERO_STEP:
        gz = gradient(z)
        return gz - np.dot(gz, z) * z
    u = s / r
    y = np.cos(r) * z + np.sin(r) * u
    gy = gradient(y)
    radial = float(np.dot(gy, -np.sin(r) * z + np.cos(r) * u))
    w = radial * u + (np.sin(r) / r) * (gy - np.dot(gy, u) * u)
    return w - np.dot(w, z) * z


def riemannian_gradient(gradient: Callable[[Array], Array], z: Array) -> Array:
    """Riemannian gradient on the sphere: the tangent part of the ambient one."""
    g = gradient(z)
    return g - np.dot(g, z) * z


def riemannian_hessian_vec(
    gradient: Callable[[Array], Array],
    hessian_vec: Callable[[Array, Array], Array],
    z: Array,
    d: Array,
) -> Array:
    """Riemannian Hessian of the sphere restriction, applied to ``d``.

    Computes ``P_z (H(z) - (g(z) . z) I) P_z d`` where ``H`` and ``g`` are the
    ambient Hessian and gradient.
    """
    g = gradient(z)
    p = d - np.dot(d, z) * z
    w = hessian_vec(z, p) - np.dot(g, z) * p
    return w - np.dot(w, z) * z


class PowerIterationError(RuntimeError):
    """Raised when the eigenvalue iteration hits its cap without converging."""


def projected_min_eig(
    apply: Callable[[Array], Array],
    project: Callable[[Array], Array],
    dim: int,
    tol: float = 1e-8,
    max_iters: int = 20000,
    seed: int = 0,
) -> float:
    """Smallest eigenvalue of ``P H P`` restricted to the range of ``P``.

    ``apply`` evaluates a symmetric operator ``H``, ``project`` the orthogonal
    projector ``P`` onto the subspace of interest.  Two power iterations: the
    first estimates the spectral radius, the second runs on the shifted
    operator ``sigma I - P H P`` whose dominant eigenvalue is
    ``sigma - lambda_min``.  Stops when the eigenresidual drops below ``tol``
    (symmetric operators locate an eigenvalue within the residual).

    Raises
    ------
    PowerIterationError
        If either phase fails to reach ``tol`` within ``max_iters``.
    """
    rng = np.random.default_rng(seed)
    v = project(rng.standard_normal(dim))
    nv = float(np.linalg.norm(v))
    if nv < 1e-300:
        raise ValueError("projector annihilates the start vector; subspace looks trivial")
    v /= nv

    def _dominant(op):
        w = v.copy()
        theta = 0.0
        for _ in range(max_iters):
            hw = project(op(w))
            theta = float(np.dot(w, hw))
            resid = float(np.linalg.norm(hw - theta * w))
            if resid <= tol * max(1.0, abs(theta)):
                return theta
            nw = float(np.linalg.norm(hw))
            if nw < 1e-300:
                # operator annihilates the iterate: eigenvalue 0 exactly
                return 0.0
            w = hw / nw
        raise PowerIterationError(
            f"power iteration did not reach tol={tol:g} within {max_iters} iterations"
        )

    theta1 = _dominant(apply)
    sigma = 1.01 * abs(theta1) + tol + 1e-12
    theta2 = _dominant(lambda w: sigma * w - apply(w))
    return sigma - theta2


def min_hessian_eig(
    gradient: Callable[[Array], Array],
    hessian_vec: Callable[[Array, Array], Array],
    z: Array,
    tol: float = 1e-8,
    max_iters: int = 20000,
) -> float:
    """Smallest eigenvalue of the sphere Riemannian Hessian at ``z``,
    matrix-free over the tangent space.  Returns ``+inf`` for the
    zero-dimensional tangent space of the 1-sphere."""
    n = z.shape[0]
    if n == 1:
        return np.inf
    g = gradient(z)
    lam = float(np.dot(g, z))

    def _apply(d):
        return hessian_vec(z, d) - lam * d

    def _proj(w):
        return w - np.dot(w, z) * z

    return projected_min_eig(_apply, _proj, n, tol=tol, max_iters=max_iters)


def orthonormal_complement(v: Array) -> Array:
    """Orthonormal basis of the hyperplane orthogonal to a single vector.

    Returns an ``(n, n - 1)`` matrix with orthonormal columns spanning
    ``{u : <u, v> = 0}``, built from a Householder QR of ``v``.
    """
    v = np.asarray(v, dtype=float).reshape(-1, 1)
    if np.linalg.norm(v) == 0.0:
        raise ValueError("cannot complement the zero vector")
    q, _ = np.linalg.qr(v, mode="complete")
    return q[:, 1:]
