"""Seeded benchmark problem generators.

Least squares on the simplex with a planted interior or boundary solution,
a strict-saddle test function, random quadratics, a lasso instance on the
1-norm ball with a reference solution, and a weighted-simplex variant.
Every generator is a pure function of its seed; identical arguments give
bit-identical problems.

Gradient Lipschitz constants are computed by power iteration on A'A to
relative 1e-6.  The gradient sup-norm bound M over the feasible set is
exact: the gradient of a quadratic is affine in x, so the entrywise maximum
of |grad f| over a polytope is attained at a vertex, and the vertices of the
(weighted) simplex and 1-norm ball are cheap to enumerate in closed form.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from .geometry import SimplexPoint
from .hadamard import Objective
from .projection import ProjectionAlgo, project_l1_ball, project_simplex_array

Array = np.ndarray

__all__ = [
    "LeastSquaresProblem",
    "LassoProblem",
    "WeightedProblem",
    "ProblemSpec",
    "gen_least_squares",
    "gen_strict_saddle",
    "gen_random_quadratic",
    "gen_lasso",
    "gen_weighted_ls",
    "uniform_simplex",
    "save_least_squares",
    "load_least_squares",
    "HPRB_MAGIC",
]

HPRB_MAGIC = b"HPRB"
_TRUTH_CODES = {"interior": 0, "boundary": 1, "unknown": 2}
_CODE_TRUTH = {v: k for k, v in _TRUTH_CODES.items()}


def uniform_simplex(n: int) -> Array:
    return np.full(n, 1.0 / n)


def _num_rows(n: int) -> int:
    return max(1, round(0.1 * n))


def _top_gram_eig(A: Array, rng: np.random.Generator, rel_tol: float = 1e-6) -> float:
    """Largest eigenvalue of A'A (= sigma_max(A)^2) by power iteration."""
    n = A.shape[1]
    v = rng.standard_normal(n)
    v /= np.linalg.norm(v)
    theta = 0.0
    for _ in range(50_000):
        w = A.T @ (A @ v)
        nw = float(np.linalg.norm(w))
        if nw == 0.0:
            return 0.0
        new = float(np.dot(v, w))
        v = w / nw
        if abs(new - theta) <= rel_tol * max(abs(new), 1e-300):
            return new
        theta = new
    return theta


def _ls_objective(A: Array, b: Array, L: float, M: float) -> Objective:
    """f(x) = ||Ax - b||^2 with analytic first and second order oracles."""
    n = A.shape[1]

    def value(x):
        r = A @ x - b
        return float(np.dot(r, r))

    def gradient(x):
        return 2.0 * (A.T @ (A @ x - b))

    def hessian_vec(x, d):
        return 2.0 * (A.T @ (A @ d))

    return Objective(n, value, gradient, hessian_vec, lipschitz_grad=L, grad_inf_bound=M)


@dataclass(frozen=True)
class LeastSquaresProblem:
    """Consistent least squares ||Ax - b||^2 with planted simplex solution.

    b = A @ x_true by construction, so the optimal value on the simplex is
    exactly zero.  m = max(1, round(0.1 n)).
    """

    A: Array
    b: Array
    x_true: SimplexPoint
    truth_kind: str
    seed: int

    @property
    def m(self) -> int:
        return self.A.shape[0]

    @property
    def n(self) -> int:
        return self.A.shape[1]


@dataclass(frozen=True)
class LassoProblem:
    """Consistent sparse least squares on the unit 1-norm ball.

    ``x_oracle`` is the solution of a projected-gradient reference solver
    run to a 1e-12 step tolerance; for the generated sizes it coincides with
    ``x_true`` up to solver accuracy.
    """

    A: Array
    b: Array
    x_true: Array
    x_oracle: Array
    seed: int


@dataclass(frozen=True)
class WeightedProblem:
    """Least squares with planted solution on the weighted simplex <a, x> = 1."""

    A: Array
    b: Array
    weights: Array
    x_true: Array
    seed: int


def gen_least_squares(
    n: int, truth_kind: str = "interior", seed: int = 0
) -> Tuple[LeastSquaresProblem, Objective]:
    """Gaussian A (m = max(1, round(0.1 n))), planted x_true, b = A x_true.

    interior: x_true uniform on the simplex (normalized unit exponentials);
    boundary: x_true the Euclidean simplex projection of a standard Gaussian,
    which zeroes a large fraction of coordinates.  The returned objective
    carries L = 2 sigma_max(A)^2 and the exact vertex bound M.
    """
    if n < 2:
        raise ValueError("n must be >= 2")
    truth_kind = truth_kind.lower()
    if truth_kind not in ("interior", "boundary"):
        raise ValueError(f"truth_kind must be 'interior' or 'boundary', got {truth_kind!r}")
    rng = np.random.default_rng(seed)
    m = _num_rows(n)
    A = rng.standard_normal((m, n))
    if truth_kind == "interior":
        e = rng.standard_exponential(n)
        x = e / np.sum(e)
    else:
        # python backend regardless of compiled availability: generated
        # problems must be identical across installs
        x = project_simplex_array(rng.standard_normal(n), ProjectionAlgo.SORT, backend="python")
    b = A @ x
    L = 2.0 * _top_gram_eig(A, rng)
    gram = A.T @ A
    atb = A.T @ b
    M = 2.0 * float(np.max(np.abs(gram - atb[:, None])))
    problem = LeastSquaresProblem(A, b, SimplexPoint(x), truth_kind, seed)
    return problem, _ls_objective(A, b, L, M)


def gen_strict_saddle(n: int) -> Objective:
    """f(x) = -||x||^2: uniform point is a strict saddle on the simplex,
    vertices are the minimizers (value -1)."""
    if n < 2:
        raise ValueError("n must be >= 2")
    return Objective(
        n,
        lambda x: -float(np.dot(x, x)),
        lambda x: -2.0 * x,
        lambda x, d: -2.0 * d,
        lipschitz_grad=2.0,
        grad_inf_bound=2.0,
    )


def gen_random_quadratic(n: int, seed: int = 0, convex: bool = True) -> Objective:
    """f(x) = x'Qx/2 + c'x with Q either PSD (Gram) or symmetric indefinite."""
    if n < 2:
        raise ValueError("n must be >= 2")
    rng = np.random.default_rng(seed)
    B = rng.standard_normal((n, n))
    Q = (B.T @ B) / n if convex else (B + B.T) / (2.0 * np.sqrt(n))
    c = rng.standard_normal(n)
    L = float(np.max(np.abs(np.linalg.eigvalsh(Q))))
    M = float(np.max(np.abs(Q + c[:, None])))

    def value(x):
        return 0.5 * float(np.dot(x, Q @ x)) + float(np.dot(c, x))

    return Objective(
        n,
        value,
        lambda x: Q @ x + c,
        lambda x, d: Q @ d,
        lipschitz_grad=L,
        grad_inf_bound=M,
    )


def _pgd_l1_oracle(A: Array, b: Array, L: float, tol: float = 1e-12, max_iters: int = 500_000) -> Array:
    """Reference lasso solver: projected gradient on the unit 1-norm ball,
    fixed step 1/L, run to a step-norm tolerance."""
    n = A.shape[1]
    x = np.zeros(n)
    step = 1.0 / L
    for _ in range(max_iters):
        g = 2.0 * (A.T @ (A @ x - b))
        x_new = project_l1_ball(x - step * g)
        if float(np.linalg.norm(x_new - x)) <= tol:
            return x_new
        x = x_new
    return x


def gen_lasso(n: int, sparsity: int, seed: int = 0) -> Tuple[LassoProblem, Objective]:
    """Quadratic on the unit 1-norm ball with a planted sparse solution.

    x_true has ``sparsity`` nonzeros and unit 1-norm, b = A x_true with
    m = round(n/2) Gaussian rows, so x_true attains the optimal value 0 on
    the ball boundary.  M is exact over the ball's vertices {+-e_j}.
    """
    if not 1 <= sparsity <= n:
        raise ValueError("need 1 <= sparsity <= n")
    rng = np.random.default_rng(seed)
    m = max(1, round(0.5 * n))
    A = rng.standard_normal((m, n))
    support = rng.choice(n, size=sparsity, replace=False)
    vals = rng.standard_normal(sparsity)
    vals /= np.sum(np.abs(vals))
    x_true = np.zeros(n)
    x_true[support] = vals
    b = A @ x_true
    L = 2.0 * _top_gram_eig(A, rng)
    gram = A.T @ A
    atb = A.T @ b
    M = 2.0 * float(max(np.max(np.abs(gram - atb[:, None])), np.max(np.abs(gram + atb[:, None]))))
    x_oracle = _pgd_l1_oracle(A, b, L)
    problem = LassoProblem(A, b, x_true, x_oracle, seed)
    return problem, _ls_objective(A, b, L, M)


def gen_weighted_ls(n: int, seed: int = 0) -> Tuple[WeightedProblem, Objective]:
    """Least squares with x_true planted on {x >= 0, <a, x> = 1},
    a ~ Uniform[0.5, 2]^n."""
    if n < 2:
        raise ValueError("n must be >= 2")
    rng = np.random.default_rng(seed)
    a = rng.uniform(0.5, 2.0, n)
    m = _num_rows(n)
    A = rng.standard_normal((m, n))
    d = rng.standard_exponential(n)
    x = d / np.dot(a, d)
    b = A @ x
    L = 2.0 * _top_gram_eig(A, rng)
    gram = A.T @ A
    atb = A.T @ b
    # vertices of the weighted simplex are e_j / a_j
    M = 2.0 * float(np.max(np.abs(gram / a[None, :] - atb[:, None])))
    problem = WeightedProblem(A, b, a, x, seed)
    return problem, _ls_objective(A, b, L, M)


_KINDS = ("LeastSquares", "RandomQuadratic", "StrictSaddle", "Lasso", "WeightedLS")
_KIND_ALIASES = {k.replace("-", "").replace("_", "").lower(): k for k in _KINDS}


@dataclass(frozen=True)
class ProblemSpec:
    """Declarative handle used by the bench harness and the CLI.

    ``params`` carries kind-specific options: truth_kind for LeastSquares,
    convex for RandomQuadratic, sparsity for Lasso.
    """

    kind: str
    n: int
    seed: int = 0
    params: Optional[dict] = None

    def __post_init__(self):
        key = self.kind.replace("-", "").replace("_", "").lower()
        if key not in _KIND_ALIASES:
            raise ValueError(f"unknown problem kind {self.kind!r}; expected one of {_KINDS}")
        object.__setattr__(self, "kind", _KIND_ALIASES[key])
        if self.n < 2:
            raise ValueError("n must be >= 2")
        if self.params is None:
            object.__setattr__(self, "params", {})

    def build(self) -> Tuple[Objective, Optional[float], dict]:
        """Returns (objective, known optimal value or None, extras).

        extras carries generator-specific artifacts (planted/oracle points,
        weights) keyed by name.
        """
        p = self.params
        if self.kind == "LeastSquares":
            prob, obj = gen_least_squares(self.n, p.get("truth_kind", "interior"), self.seed)
            return obj, 0.0, {"problem": prob, "x_true": prob.x_true.coords}
        if self.kind == "StrictSaddle":
            return gen_strict_saddle(self.n), -1.0, {}
        if self.kind == "RandomQuadratic":
            obj = gen_random_quadratic(self.n, self.seed, bool(p.get("convex", True)))
            return obj, None, {}
        if self.kind == "Lasso":
            prob, obj = gen_lasso(self.n, int(p.get("sparsity", 3)), self.seed)
            return obj, 0.0, {"problem": prob, "x_true": prob.x_true, "x_oracle": prob.x_oracle}
        prob, obj = gen_weighted_ls(self.n, self.seed)
        return obj, 0.0, {"problem": prob, "weights": prob.weights, "x_true": prob.x_true}


def save_least_squares(path, problem: LeastSquaresProblem) -> None:
    """Dense binary layout: 16-byte header (magic 'HPRB', u32 m, u32 n,
    u32 truth-kind code, little-endian), then row-major float64 A, then b,
    then x_true."""
    code = _TRUTH_CODES.get(problem.truth_kind, _TRUTH_CODES["unknown"])
    header = HPRB_MAGIC + struct.pack("<III", problem.m, problem.n, code)
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(np.ascontiguousarray(problem.A, dtype="<f8").tobytes())
        fh.write(np.asarray(problem.b, dtype="<f8").tobytes())
        fh.write(np.asarray(problem.x_true.coords, dtype="<f8").tobytes())


def load_least_squares(path) -> LeastSquaresProblem:
    """Inverse of save_least_squares.  The seed is not stored; loaded
    problems report seed -1."""
    with open(path, "rb") as fh:
        header = fh.read(16)
        if len(header) != 16 or header[:4] != HPRB_MAGIC:
            raise ValueError(f"{path}: not an HPRB file")
        m, n, code = struct.unpack("<III", header[4:])
        body = np.frombuffer(fh.read(), dtype="<f8")
    expected = m * n + m + n
    if body.size != expected:
        raise ValueError(f"{path}: expected {expected} float64 values, found {body.size}")
    A = body[: m * n].reshape(m, n).copy()
    b = body[m * n : m * n + m].copy()
    x = body[m * n + m :].copy()
    truth = _CODE_TRUTH.get(code, "unknown")
    return LeastSquaresProblem(A, b, SimplexPoint(x), truth, -1)
