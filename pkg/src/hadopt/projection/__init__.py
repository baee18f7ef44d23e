"""Euclidean projection onto the probability simplex.

Four published algorithms, each available as a compiled Cython kernel with a
NumPy fallback.  The compiled backend is chosen at import time when the
extension was built; ``backend="python"`` forces the fallback, which the
projection micro-benchmark uses to compare the two.
"""

from __future__ import annotations

import enum
from typing import Optional

import numpy as np

from ..geometry import SimplexPoint
from . import kernels_py

try:  # pragma: no cover - exercised only when the extension is built
    from . import _kernels

    HAVE_COMPILED = True
except ImportError:  # pragma: no cover
    _kernels = None
    HAVE_COMPILED = False

__all__ = [
    "ProjectionAlgo",
    "project_simplex",
    "project_simplex_array",
    "project_l1_ball",
    "HAVE_COMPILED",
]


class ProjectionAlgo(enum.Enum):
    SORT = "SortProject"
    PIVOT = "PivotProject"
    DUCHI = "DuchiProject"
    CONDAT = "CondatProject"


_PY = {
    ProjectionAlgo.SORT: kernels_py.sort_project,
    ProjectionAlgo.PIVOT: kernels_py.pivot_project,
    ProjectionAlgo.DUCHI: kernels_py.duchi_project,
    ProjectionAlgo.CONDAT: kernels_py.condat_project,
}

_COMPILED = (
    {
        ProjectionAlgo.SORT: _kernels.sort_project,
        ProjectionAlgo.PIVOT: _kernels.pivot_project,
        ProjectionAlgo.DUCHI: _kernels.duchi_project,
        ProjectionAlgo.CONDAT: _kernels.condat_project,
    }
    if HAVE_COMPILED
    else {}
)


def _coerce_algo(algo) -> ProjectionAlgo:
    if isinstance(algo, ProjectionAlgo):
        return algo
    try:
        return ProjectionAlgo(algo)
    except ValueError:
        pass
    try:
        return ProjectionAlgo[str(algo).upper()]
    except KeyError:
        raise ValueError(f"unknown projection algorithm {algo!r}") from None


def project_simplex_array(
    y: np.ndarray,
    algo: ProjectionAlgo = ProjectionAlgo.DUCHI,
    backend: Optional[str] = None,
) -> np.ndarray:
    """Project ``y`` onto ``{x >= 0, sum(x) = 1}``; returns a plain array.

    ``backend`` is ``None`` (compiled when available), ``"compiled"`` or
    ``"python"``.  Raises on non-finite input and on an explicit request for
    the compiled backend when it was not built.
    """
    y = np.ascontiguousarray(y, dtype=float)
    if y.ndim != 1 or y.shape[0] < 1:
        raise ValueError("projection input must be a nonempty 1-d vector")
    if not np.all(np.isfinite(y)):
        raise ValueError("projection input contains non-finite entries")
    algo = _coerce_algo(algo)
    if backend is None:
        table = _COMPILED if HAVE_COMPILED else _PY
    elif backend == "compiled":
        if not HAVE_COMPILED:
            raise RuntimeError("compiled projection kernels are not built")
        table = _COMPILED
    elif backend == "python":
        table = _PY
    else:
        raise ValueError(f"unknown backend {backend!r}")
    return np.asarray(table[algo](y))


def project_simplex(
    y: np.ndarray,
    algo: ProjectionAlgo = ProjectionAlgo.DUCHI,
    backend: Optional[str] = None,
) -> SimplexPoint:
    """Euclidean projection onto the probability simplex as a :class:`SimplexPoint`."""
    return SimplexPoint(project_simplex_array(y, algo=algo, backend=backend))


def project_l1_ball(
    y: np.ndarray,
    radius: float = 1.0,
    algo: ProjectionAlgo = ProjectionAlgo.SORT,
    backend: Optional[str] = None,
) -> np.ndarray:
    """Euclidean projection onto ``{x : ||x||_1 <= radius}``.

    Standard sign-split reduction: points inside the ball are fixed,
    otherwise project |y|/radius onto the simplex and restore signs.
    """
    if radius <= 0:
        raise ValueError("radius must be positive")
    y = np.ascontiguousarray(y, dtype=float)
    if float(np.sum(np.abs(y))) <= radius:
        return y.copy()
    w = project_simplex_array(np.abs(y) / radius, algo=algo, backend=backend)
    return np.sign(y) * (radius * w)
