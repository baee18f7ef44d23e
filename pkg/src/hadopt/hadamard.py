"""Objectives and the Hadamard-square pullback calculus.

The probability simplex is the image of the unit sphere under the entrywise
square ``x = z * z``.  Pulling a simplex objective ``f`` back through this map
gives a sphere objective ``g(z) = f(z * z)`` whose derivatives have closed
forms:

    grad g(z)      = 2 * grad f(x) * z
    hess g(z) d    = 2 * grad f(x) * d + 4 * z * (hess f(x) (z * d))

with ``x = z * z`` throughout.  A gradient-Lipschitz constant transfers as
``4 * L + 2 * M`` where ``L`` is the constant of ``f`` on the simplex and
``M`` bounds ``max_x ||grad f(x)||_inf`` there.

The signed variant maps the unit 2-norm ball in 2n variables onto the unit
1-norm ball via ``x = z_u * z_u - z_v * z_v``; see
:class:`DoublePullbackObjective`.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

Array = np.ndarray

__all__ = [
    "Objective",
    "PullbackObjective",
    "DoublePullbackObjective",
    "hadamard_square",
    "hadamard_sqrt",
    "signed_sqrt_split",
    "signed_square_join",
    "transfer_lipschitz",
    "fd_gradient",
    "fd_hessian_vec",
]


@dataclass
class Objective:
    """A smooth objective with optional curvature and smoothness metadata.

    Parameters
    ----------
    dim : int
        Ambient dimension of the argument.
    value : callable
        ``value(x) -> float``.
    gradient : callable
        ``gradient(x) -> ndarray`` of shape ``(dim,)``.
    hessian_vec : callable, optional
        ``hessian_vec(x, d) -> ndarray``, the Hessian-vector product.
        When absent, callers that need curvature fall back to central
        differences of the gradient.
    lipschitz_grad : float, optional
        A gradient-Lipschitz constant ``L`` valid on the feasible set.
    grad_inf_bound : float, optional
        A bound ``M >= max ||grad f(x)||_inf`` over the feasible set.
    """

    dim: int
    value: Callable[[Array], float]
    gradient: Callable[[Array], Array]
    hessian_vec: Optional[Callable[[Array, Array], Array]] = None
    lipschitz_grad: Optional[float] = None
    grad_inf_bound: Optional[float] = None

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError(f"objective dimension must be positive, got {self.dim}")
        if self.lipschitz_grad is not None and self.lipschitz_grad < 0:
            raise ValueError("lipschitz_grad must be nonnegative")
        if self.grad_inf_bound is not None and self.grad_inf_bound < 0:
            raise ValueError("grad_inf_bound must be nonnegative")

    def hessian_vec_or_fd(self, x: Array, d: Array) -> Array:
        """Hessian-vector product, analytic when available else central FD."""
        if self.hessian_vec is not None:
            return self.hessian_vec(x, d)
        return fd_hessian_vec(self.gradient, x, d)


def hadamard_square(z: Array) -> Array:
    """Entrywise square ``x = z * z``.

    Maps the unit sphere onto the probability simplex: ``sum(x) = ||z||^2``
    and ``x >= 0`` automatically.
    """
    z = np.asarray(z, dtype=float)
    return z * z


def hadamard_sqrt(x: Array) -> Array:
    """Entrywise square root, the canonical (nonnegative) section of the square map.

    Raises
    ------
    ValueError
        If any entry of ``x`` is below ``-1e-12``.  Entries in ``[-1e-12, 0)``
        are clipped to zero so that points feasible up to roundoff stay usable.
    """
    x = np.asarray(x, dtype=float)
    if np.min(x, initial=0.0) < -1e-12:
        raise ValueError(f"negative entry {np.min(x):.3e} outside the -1e-12 tolerance")
    return np.sqrt(np.clip(x, 0.0, None))


def signed_sqrt_split(x: Array) -> Array:
    """Map a point of the unit 1-norm ball to the canonical 2n-dimensional preimage.

    Returns ``w = (sqrt(max(x, 0)), sqrt(max(-x, 0)))`` which satisfies
    ``signed_square_join(w) == x`` up to roundoff and ``||w||^2 = ||x||_1``.
    """
    x = np.asarray(x, dtype=float)
    return np.concatenate([np.sqrt(np.clip(x, 0.0, None)), np.sqrt(np.clip(-x, 0.0, None))])


def signed_square_join(w: Array) -> Array:
    """Inverse direction of the signed split: ``x = w_u * w_u - w_v * w_v``."""
    w = np.asarray(w, dtype=float)
    if w.shape[0] % 2 != 0:
        raise ValueError("signed parametrization requires an even-dimensional point")
    n = w.shape[0] // 2
    return w[:n] * w[:n] - w[n:] * w[n:]


def transfer_lipschitz(L: float, M: float) -> float:
    """Gradient-Lipschitz constant of the pullback from the constants of the base.

    ``L`` is a gradient-Lipschitz constant of ``f`` on the simplex and ``M``
    bounds the sup-norm of ``grad f`` there; the pullback ``g(z) = f(z * z)``
    is then ``4 L + 2 M`` gradient-Lipschitz on the unit sphere.  The sup-norm
    convention makes the constant no larger than its 2-norm counterpart.
    """
    if L < 0 or M < 0:
        raise ValueError("Lipschitz constants must be nonnegative")
    return 4.0 * L + 2.0 * M


class PullbackObjective:
    """Sphere objective ``g(z) = f(z * z)`` induced by a simplex objective ``f``.

    Exposes the same interface as :class:`Objective` (``value``, ``gradient``,
    ``hessian_vec``) so sphere solvers can consume either directly.
    """

    def __init__(self, base: Objective):
        self.base = base
        self.dim = base.dim

    def value(self, z: Array) -> float:
        return self.base.value(z * z)

    def gradient(self, z: Array) -> Array:
        return 2.0 * self.base.gradient(z * z) * z

    def hessian_vec(self, z: Array, d: Array) -> Array:
        if self.base.hessian_vec is None:
            raise ValueError("base objective does not define hessian_vec")
        x = z * z
        g = self.base.gradient(x)
        return 2.0 * g * d + 4.0 * z * self.base.hessian_vec(x, z * d)

    @property
    def lipschitz_grad(self) -> Optional[float]:
        L, M = self.base.lipschitz_grad, self.base.grad_inf_bound
        if L is None or M is None:
            return None
        return transfer_lipschitz(L, M)

    def hessian_vec_or_fd(self, z: Array, d: Array) -> Array:
        x = z * z
        g = self.base.gradient(x)
        return 2.0 * g * d + 4.0 * z * self.base.hessian_vec_or_fd(x, z * d)


class DoublePullbackObjective:
    """Objective ``G(w) = f(w_u * w_u - w_v * w_v)`` on 2n variables.

    Restricting ``w = (w_u, w_v)`` to the unit sphere of dimension 2n sweeps
    out the full unit 1-norm ball in ``x = w_u^2 - w_v^2``, which turns
    1-norm-ball-constrained problems into sphere-constrained ones.
    """

    def __init__(self, base: Objective):
        self.base = base
        self.dim = 2 * base.dim

    def value(self, w: Array) -> float:
        return self.base.value(signed_square_join(w))

    def gradient(self, w: Array) -> Array:
        n = self.base.dim
        g = self.base.gradient(signed_square_join(w))
        return np.concatenate([2.0 * g * w[:n], -2.0 * g * w[n:]])

    def hessian_vec(self, w: Array, d: Array) -> Array:
        if self.base.hessian_vec is None:
            raise ValueError("base objective does not define hessian_vec")
        return self._hessian_vec(w, d, self.base.hessian_vec)

    def _hessian_vec(self, w: Array, d: Array, base_hess) -> Array:
        n = self.base.dim
        x = signed_square_join(w)
        g = self.base.gradient(x)
        # Directional second derivative through the signed square map:
        # dx = 2 (w_u * d_u - w_v * d_v), then chain rule on f.
        dx = 2.0 * (w[:n] * d[:n] - w[n:] * d[n:])
        hdx = base_hess(x, dx)
        upper = 2.0 * g * d[:n] + 2.0 * w[:n] * hdx
        lower = -2.0 * g * d[n:] - 2.0 * w[n:] * hdx
        return np.concatenate([upper, lower])

    @property
    def lipschitz_grad(self) -> Optional[float]:
        L, M = self.base.lipschitz_grad, self.base.grad_inf_bound
        if L is None or M is None:
            return None
        return transfer_lipschitz(L, M)

    def hessian_vec_or_fd(self, w: Array, d: Array) -> Array:
        return self._hessian_vec(w, d, self.base.hessian_vec_or_fd)


def fd_gradient(value: Callable[[Array], float], x: Array, h: Optional[float] = None) -> Array:
    """Central-difference gradient with step ``eps**(1/3) * max(1, ||x||)``."""
    x = np.asarray(x, dtype=float)
    if h is None:
        h = float(np.finfo(float).eps ** (1.0 / 3.0)) * max(1.0, float(np.linalg.norm(x)))
    g = np.empty_like(x)
    e = np.zeros_like(x)
    for i in range(x.shape[0]):
        e[i] = h
        g[i] = (value(x + e) - value(x - e)) / (2.0 * h)
        e[i] = 0.0
    return g


def fd_hessian_vec(
    gradient: Callable[[Array], Array], x: Array, d: Array, h: Optional[float] = None
) -> Array:
    """Central-difference Hessian-vector product from a gradient callable."""
    x = np.asarray(x, dtype=float)
    d = np.asarray(d, dtype=float)
    nd = float(np.linalg.norm(d))
    if nd == 0.0:
        return np.zeros_like(x)
    if h is None:
        h = float(np.finfo(float).eps ** (1.0 / 3.0)) * max(1.0, float(np.linalg.norm(x))) / nd
    return (gradient(x + h * d) - gradient(x - h * d)) / (2.0 * h)
