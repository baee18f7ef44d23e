"""Optimization over the probability simplex through the Hadamard square map.

Substituting x = z * z turns minimization over the simplex into smooth
unconstrained minimization on the unit sphere.  The package provides the
calculus of that substitution, sphere geometry primitives, Riemannian
solvers (fixed step, perturbed, Armijo-Wolfe and Barzilai-Borwein line
searches), classical simplex baselines (projected gradient, entropic mirror
descent, Frank-Wolfe), stationarity certificates, seeded benchmark
problems, and a benchmarking CLI.
"""

from .baselines import PgdConfig, emda, frank_wolfe, pgd_linesearch
from .bench import BenchConfig, BenchResult, emit_plot_data, run_bench
from .geometry import (
    Geometry,
    GeometryKind,
    ManifoldPoint,
    PowerIterationError,
    SimplexPoint,
    TangentVector,
    exp_map,
    min_hessian_eig,
    orthonormal_complement,
    projected_min_eig,
    retract,
    riemannian_gradient,
    riemannian_hessian_vec,
    sphere_geodesic,
    tangent_project,
    tangent_pullback_gradient,
)
from .hadamard import (
    DoublePullbackObjective,
    Objective,
    PullbackObjective,
    fd_gradient,
    fd_hessian_vec,
    hadamard_sqrt,
    hadamard_square,
    signed_sqrt_split,
    signed_square_join,
    transfer_lipschitz,
)
from .kkt import (
    KKT_REPORT_SCHEMA,
    CorrespondenceError,
    KktReport,
    Verdict,
    epsilon_sosp_check,
    kkt_check_extended,
    kkt_check_simplex,
    kkt_check_sphere,
    verify_correspondence,
)
from .optimizers import (
    AwConfig,
    BbConfig,
    PrgdConfig,
    RgdConfig,
    RunTrace,
    Status,
    had_prgd,
    had_rgd,
    had_rgd_aw,
    had_rgd_bb,
    had_rgd_bb_sphere,
    tangent_space_steps,
    uniform_tangent_ball,
)
from .problems import (
    LassoProblem,
    LeastSquaresProblem,
    ProblemSpec,
    WeightedProblem,
    gen_lasso,
    gen_least_squares,
    gen_random_quadratic,
    gen_strict_saddle,
    gen_weighted_ls,
    load_least_squares,
    uniform_simplex,
    save_least_squares,
)
from .projection import (
    HAVE_COMPILED,
    ProjectionAlgo,
    project_l1_ball,
    project_simplex,
    project_simplex_array,
)

__version__ = "0.1.0"

__all__ = [
    "AwConfig",
    "BbConfig",
    "BenchConfig",
    "BenchResult",
    "CorrespondenceError",
    "DoublePullbackObjective",
    "Geometry",
    "GeometryKind",
    "HAVE_COMPILED",
    "KKT_REPORT_SCHEMA",
    "KktReport",
    "LassoProblem",
    "LeastSquaresProblem",
    "ManifoldPoint",
    "Objective",
    "PgdConfig",
    "PowerIterationError",
    "PrgdConfig",
    "ProblemSpec",
    "ProjectionAlgo",
    "PullbackObjective",
    "RgdConfig",
    "RunTrace",
    "SimplexPoint",
    "Status",
    "TangentVector",
    "Verdict",
    "WeightedProblem",
    "emda",
    "emit_plot_data",
    "epsilon_sosp_check",
    "exp_map",
    "fd_gradient",
    "fd_hessian_vec",
    "frank_wolfe",
    "gen_lasso",
    "gen_least_squares",
    "gen_random_quadratic",
    "gen_strict_saddle",
    "gen_weighted_ls",
    "had_prgd",
    "had_rgd",
    "had_rgd_aw",
    "had_rgd_bb",
    "had_rgd_bb_sphere",
    "hadamard_sqrt",
    "hadamard_square",
    "kkt_check_extended",
    "kkt_check_simplex",
    "kkt_check_sphere",
    "load_least_squares",
    "min_hessian_eig",
    "orthonormal_complement",
    "pgd_linesearch",
    "project_l1_ball",
    "project_simplex",
    "project_simplex_array",
    "projected_min_eig",
    "retract",
    "riemannian_gradient",
    "riemannian_hessian_vec",
    "run_bench",
    "save_least_squares",
    "signed_sqrt_split",
    "signed_square_join",
    "sphere_geodesic",
    "tangent_project",
    "tangent_pullback_gradient",
    "tangent_space_steps",
    "transfer_lipschitz",
    "uniform_simplex",
    "uniform_tangent_ball",
    "verify_correspondence",
]
