"""Benchmark harness: solver-by-dimension grids with CSV/JSON outputs.

A grid cell is (solver, n); each cell runs ``trials`` seeded repetitions of
problem generation plus one solve, with seed = global seed + trial index.
Outputs: ``results.csv`` (one row per trial), ``summary.json`` (per-cell
mean/min/max aggregates), per-run trace CSVs under ``traces/``, and
long-format plot CSVs.  Solver exceptions are recorded in the trial's
status column and never abort the grid.

Wall-clock numbers come from the solver traces, which time the solver call
only; every other column is a deterministic function of the config, so two
runs of the same config differ at most in the timing columns.
"""

from __future__ import annotations

import csv
import enum
import gzip
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Tuple

import numpy as np

from . import baselines, optimizers
from .hadamard import Objective, transfer_lipschitz
from .problems import ProblemSpec, uniform_simplex

__all__ = [
    "ConfigError",
    "SolverSetting",
    "BenchConfig",
    "TrialRecord",
    "BenchResult",
    "PlotKind",
    "SOLVER_NAMES",
    "run_single",
    "run_bench",
    "emit_plot_data",
    "run_projection_bench",
]


class ConfigError(ValueError):
    """Malformed benchmark configuration (CLI exit code 1)."""


def _canon(name: str) -> str:
    return name.replace("-", "").replace("_", "").lower()


def _default_iters_fw(n: int) -> int:
    return max(1, round(1000.0 * math.sqrt(n)))


def _need_L(obj: Objective, solver: str) -> float:
    if obj.lipschitz_grad is None:
        raise ValueError(f"{solver} needs the objective's gradient Lipschitz constant")
    return obj.lipschitz_grad


def _rgd_step(obj: Objective, opts: dict, solver: str) -> float:
    if "step_size" in opts:
        return float(opts["step_size"])
    if obj.lipschitz_grad is None or obj.grad_inf_bound is None:
        raise ValueError(f"{solver} needs L and M (or an explicit step_size option)")
    return 1.0 / transfer_lipschitz(obj.lipschitz_grad, obj.grad_inf_bound)


def _run_pgd(obj, x0, target, max_iters, opts, seed, n, boundary):
    base = float(opts["base_step"]) if "base_step" in opts else 20.0 / _need_L(obj, "PGD-LS")
    cfg = baselines.PgdConfig(
        base_step=base,
        decay=float(opts.get("decay", 0.75)),
        armijo=float(opts.get("armijo", 1e-4)),
        max_backtracks=int(opts.get("max_backtracks", 25)),
        max_iters=max_iters,
        grad_tol=float(opts.get("grad_tol", 0.0)),
        target_value=target,
    )
    return baselines.pgd_linesearch(obj, x0, cfg, algo=opts.get("projection", "DuchiProject"))


def _run_rgd(obj, x0, target, max_iters, opts, seed, n, boundary):
    cfg = optimizers.RgdConfig(
        step_size=_rgd_step(obj, opts, "HadRGD"),
        max_iters=max_iters,
        grad_tol=float(opts.get("grad_tol", 0.0)),
        target_value=target,
    )
    return optimizers.had_rgd(obj, x0, cfg)


def _run_prgd(obj, x0, target, max_iters, opts, seed, n, boundary):
    cfg = optimizers.PrgdConfig(
        step_size=_rgd_step(obj, opts, "HadPRGD"),
        max_iters=max_iters,
        grad_tol=float(opts.get("grad_tol", 0.0)),
        target_value=target,
        perturb_threshold=opts.get("perturb_threshold"),
        perturb_radius=opts.get("perturb_radius"),
        tangent_step=opts.get("tangent_step"),
        escape_radius=opts.get("escape_radius"),
        tangent_iters=int(opts.get("tangent_iters", 200)),
        hessian_lipschitz=opts.get("hessian_lipschitz"),
    )
    return optimizers.had_prgd(obj, x0, cfg, rng_seed=seed)


def _run_aw(obj, x0, target, max_iters, opts, seed, n, boundary):
    kw = dict(
        decay=float(opts.get("decay", 0.75)),
        armijo=float(opts.get("armijo", 1e-4)),
        wolfe=float(opts.get("wolfe", 0.9)),
        max_backtracks=int(opts.get("max_backtracks", 25)),
        max_iters=max_iters,
        grad_tol=float(opts.get("grad_tol", 0.0)),
        target_value=target,
        strict_wolfe=bool(opts.get("strict_wolfe", False)),
    )
    if "default_step" in opts:
        cfg = optimizers.AwConfig(default_step=float(opts["default_step"]), **kw)
    else:
        cfg = optimizers.AwConfig.for_least_squares(n, _need_L(obj, "HadRGD-AW"), boundary, **kw)
    return optimizers.had_rgd_aw(obj, x0, cfg)


def _run_bb(obj, x0, target, max_iters, opts, seed, n, boundary):
    kw = dict(
        average_weight=float(opts.get("average_weight", 0.5)),
        tolerance=float(opts.get("tolerance", 0.1)),
        max_iters=max_iters,
        grad_tol=float(opts.get("grad_tol", 0.0)),
        target_value=target,
        max_shrinks=int(opts.get("max_shrinks", 50)),
    )
    if "decay" in opts:
        kw["decay"] = float(opts["decay"])
    if "default_step" in opts:
        kw.setdefault("decay", 0.5)
        cfg = optimizers.BbConfig(default_step=float(opts["default_step"]), **kw)
    else:
        cfg = optimizers.BbConfig.for_least_squares(n, _need_L(obj, "HadRGD-BB"), boundary, **kw)
    return optimizers.had_rgd_bb(obj, x0, cfg)


def _run_emda(obj, x0, target, max_iters, opts, seed, n, boundary):
    if "step" in opts:
        step = float(opts["step"])
    else:
        if obj.grad_inf_bound is None:
            raise ValueError("EMDA needs the gradient sup-norm bound (or an explicit step option)")
        step = math.sqrt(2.0 * math.log(n) / max_iters) / obj.grad_inf_bound
    return baselines.emda(obj, x0, step, max_iters, target_value=target)


def _make_fw(linesearch: bool, pairwise: bool):
    def _run(obj, x0, target, max_iters, opts, seed, n, boundary):
        return baselines.frank_wolfe(
            obj,
            x0,
            max_iters,
            linesearch=linesearch,
            gap_tol=float(opts.get("gap_tol", 0.0)),
            target_value=target,
            pairwise=pairwise,
        )

    return _run


_REGISTRY = {
    "PGD-LS": (lambda n: 1000, _run_pgd),
    "HadRGD": (lambda n: 1000, _run_rgd),
    "HadPRGD": (lambda n: 1000, _run_prgd),
    "HadRGD-AW": (lambda n: 1000, _run_aw),
    "HadRGD-BB": (lambda n: 1000, _run_bb),
    "EMDA": (lambda n: 1000, _run_emda),
    "FW": (_default_iters_fw, _make_fw(False, False)),
    "FW-LS": (_default_iters_fw, _make_fw(True, False)),
    "PFW": (_default_iters_fw, _make_fw(True, True)),
}
_CANON_REGISTRY = {_canon(k): k for k in _REGISTRY}
SOLVER_NAMES = tuple(_REGISTRY)

_KNOWN_FSTAR = {"LeastSquares": 0.0, "StrictSaddle": -1.0, "Lasso": 0.0, "WeightedLS": 0.0}


def resolve_solver(name: str) -> str:
    key = _canon(str(name))
    if key not in _CANON_REGISTRY:
        raise ConfigError(f"unknown solver {name!r}; known: {', '.join(SOLVER_NAMES)}")
    return _CANON_REGISTRY[key]


@dataclass(frozen=True)
class SolverSetting:
    """One solver of the grid with optional config overrides."""

    name: str
    options: dict = field(default_factory=dict)
    max_iters: Optional[int] = None

    def __post_init__(self):
        object.__setattr__(self, "name", resolve_solver(self.name))
        if self.max_iters is not None and self.max_iters < 1:
            raise ConfigError("max_iters must be at least 1")


@dataclass(frozen=True)
class BenchConfig:
    """Full grid description; see README for the JSON schema."""

    solvers: Tuple[SolverSetting, ...]
    dimensions: Tuple[int, ...]
    problem_kind: str = "LeastSquares"
    problem_params: dict = field(default_factory=dict)
    trials: int = 10
    target: float = 1e-8
    f_star: Optional[float] = None
    out_dir: str = "bench_out"
    seed: int = 0
    jobs: int = 1
    gzip_traces: bool = False
    save_traces: bool = True
    plots: Tuple[str, ...] = ("IterVsN", "TimeVsN")

    def __post_init__(self):
        if not self.solvers:
            raise ConfigError("at least one solver is required")
        if not self.dimensions:
            raise ConfigError("at least one dimension is required")
        if any(n < 2 for n in self.dimensions):
            raise ConfigError("dimensions must be >= 2")
        object.__setattr__(self, "dimensions", tuple(sorted(self.dimensions)))
        if self.trials < 1:
            raise ConfigError("trials must be at least 1")
        if self.target <= 0:
            raise ConfigError("target accuracy must be positive")
        if self.jobs < 1:
            raise ConfigError("jobs must be at least 1")
        if self.f_star is None and self.problem_kind not in _KNOWN_FSTAR:
            raise ConfigError(f"f_star is required for problem kind {self.problem_kind!r}")

    @classmethod
    def from_dict(cls, raw: dict, out_dir=None, seed=None, jobs=None) -> "BenchConfig":
        if not isinstance(raw, dict):
            raise ConfigError("config root must be a JSON object")
        known = {
            "problem", "solvers", "dimensions", "trials", "target", "f_star",
            "out_dir", "seed", "jobs", "gzip_traces", "save_traces", "plots",
        }
        unknown = set(raw) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        problem = raw.get("problem", {})
        if isinstance(problem, str):
            problem = {"kind": problem}
        if not isinstance(problem, dict):
            raise ConfigError("'problem' must be an object or a kind string")
        kind = problem.get("kind", "LeastSquares")
        params = problem.get("params", {k: v for k, v in problem.items() if k != "kind"})
        try:
            spec = ProblemSpec(kind, 2, 0, dict(params))
        except ValueError as e:
            raise ConfigError(str(e)) from None
        solvers = []
        for entry in raw.get("solvers", []):
            if isinstance(entry, str):
                solvers.append(SolverSetting(entry))
            elif isinstance(entry, dict):
                solvers.append(
                    SolverSetting(
                        entry.get("name", ""),
                        dict(entry.get("options", {})),
                        entry.get("max_iters"),
                    )
                )
            else:
                raise ConfigError("solver entries must be names or objects")
        try:
            dims = tuple(int(n) for n in raw.get("dimensions", []))
            return cls(
                solvers=tuple(solvers),
                dimensions=dims,
                problem_kind=spec.kind,
                problem_params=dict(spec.params),
                trials=int(raw.get("trials", 10)),
                target=float(raw.get("target", 1e-8)),
                f_star=None if raw.get("f_star") is None else float(raw["f_star"]),
                out_dir=str(out_dir if out_dir is not None else raw.get("out_dir", "bench_out")),
                seed=int(seed if seed is not None else raw.get("seed", 0)),
                jobs=int(jobs if jobs is not None else raw.get("jobs", 1)),
                gzip_traces=bool(raw.get("gzip_traces", False)),
                save_traces=bool(raw.get("save_traces", True)),
                plots=tuple(raw.get("plots", ("IterVsN", "TimeVsN"))),
            )
        except (TypeError, ValueError) as e:
            if isinstance(e, ConfigError):
                raise
            raise ConfigError(str(e)) from None


@dataclass
class TrialRecord:
    solver: str
    n: int
    trial: int
    seed: int
    status: str
    final_f: float
    iterations: int
    iters_to_target: Optional[int]
    seconds_to_target: Optional[float]
    total_seconds: float
    trace_path: Optional[str] = None


_CSV_COLUMNS = (
    "solver", "n", "trial", "seed", "status", "final_f", "iterations",
    "iters_to_target", "seconds_to_target", "total_seconds", "trace_path",
)
# columns allowed to differ between reruns of the same config
WALL_CLOCK_COLUMNS = ("seconds_to_target", "total_seconds")


@dataclass
class BenchResult:
    config: BenchConfig
    records: List[TrialRecord]
    f_targets: Dict[int, float]

    def cell_records(self, solver: str, n: int) -> List[TrialRecord]:
        return [r for r in self.records if r.solver == solver and r.n == n]

    def aggregates(self) -> List[dict]:
        """Per-cell mean/min/max of iterations, seconds, and final f.

        Trials that never reached the target contribute their full budget to
        the iteration/seconds statistics (right-censored).
        """
        cells = []
        for s in self.config.solvers:
            for n in self.config.dimensions:
                recs = self.cell_records(s.name, n)
                if not recs:
                    continue
                iters = [r.iters_to_target if r.iters_to_target is not None else r.iterations for r in recs]
                secs = [
                    r.seconds_to_target if r.seconds_to_target is not None else r.total_seconds
                    for r in recs
                ]
                finals = [r.final_f for r in recs]
                cells.append(
                    {
                        "solver": s.name,
                        "n": n,
                        "trials": len(recs),
                        "reached_target": sum(r.iters_to_target is not None for r in recs),
                        "errors": sum(r.status.startswith("Error") for r in recs),
                        "mean_iters": float(np.mean(iters)),
                        "min_iters": float(np.min(iters)),
                        "max_iters": float(np.max(iters)),
                        "mean_seconds": float(np.mean(secs)),
                        "min_seconds": float(np.min(secs)),
                        "max_seconds": float(np.max(secs)),
                        "mean_final_f": float(np.mean(finals)),
                        "min_final_f": float(np.min(finals)),
                        "max_final_f": float(np.max(finals)),
                    }
                )
        return cells

    def any_errors(self) -> bool:
        return any(r.status.startswith("Error") for r in self.records)


def run_single(
    kind: str,
    n: int,
    solver: str,
    seed: int = 0,
    options: Optional[dict] = None,
    max_iters: Optional[int] = None,
    target: Optional[float] = None,
    f_star: Optional[float] = None,
    problem_params: Optional[dict] = None,
):
    """One problem build plus one solve; returns (point, trace, objective, extras)."""
    solver = resolve_solver(solver)
    spec = ProblemSpec(kind, n, seed, dict(problem_params or {}))
    obj, known_fstar, extras = spec.build()
    fs = f_star if f_star is not None else known_fstar
    target_value = None if (target is None or fs is None) else fs + target
    default_iters, runner = _REGISTRY[solver]
    iters = max_iters if max_iters is not None else default_iters(n)
    boundary = str((problem_params or {}).get("truth_kind", "")).lower() == "boundary"
    x0 = uniform_simplex(n)
    point, trace = runner(obj, x0, target_value, iters, dict(options or {}), seed, n, boundary)
    return point, trace, obj, extras


def _trace_name(solver: str, n: int, trial: int, gz: bool) -> str:
    safe = solver.replace("/", "-")
    return f"{safe}_n{n}_t{trial}.csv" + (".gz" if gz else "")


def _write_trace(path: Path, trace) -> None:
    if path.suffix == ".gz":
        with gzip.open(path, "wt", newline="") as fh:
            trace.to_csv(fh)
    else:
        with open(path, "w", newline="") as fh:
            trace.to_csv(fh)


def run_bench(cfg: BenchConfig) -> BenchResult:
    """Execute the full grid and write results.csv / summary.json / traces."""
    out = Path(cfg.out_dir)
    traces_dir = out / "traces"
    if cfg.save_traces:
        traces_dir.mkdir(parents=True, exist_ok=True)
    else:
        out.mkdir(parents=True, exist_ok=True)

    fs_known = _KNOWN_FSTAR.get(cfg.problem_kind)
    f_star = cfg.f_star if cfg.f_star is not None else fs_known
    if f_star is None:
        raise ConfigError(f"f_star is required for problem kind {cfg.problem_kind!r}")
    target_value = f_star + cfg.target
    f_targets = {n: target_value for n in cfg.dimensions}
    boundary = str(cfg.problem_params.get("truth_kind", "")).lower() == "boundary"

    tasks = [
        (setting, n, trial)
        for setting in cfg.solvers
        for n in cfg.dimensions
        for trial in range(cfg.trials)
    ]

    def _one(task) -> TrialRecord:
        setting, n, trial = task
        seed = cfg.seed + trial
        default_iters, runner = _REGISTRY[setting.name]
        iters = setting.max_iters if setting.max_iters is not None else default_iters(n)
        try:
            spec = ProblemSpec(cfg.problem_kind, n, seed, dict(cfg.problem_params))
            obj, _, _ = spec.build()
            x0 = uniform_simplex(n)
            point, trace = runner(obj, x0, target_value, iters, dict(setting.options), seed, n, boundary)
        except Exception as exc:  # recorded, never aborts the grid
            return TrialRecord(
                setting.name, n, trial, seed, f"Error:{type(exc).__name__}",
                float("nan"), 0, None, None, 0.0,
            )
        trace_path = None
        if cfg.save_traces:
            p = traces_dir / _trace_name(setting.name, n, trial, cfg.gzip_traces)
            _write_trace(p, trace)
            trace_path = str(p)
        return TrialRecord(
            setting.name,
            n,
            trial,
            seed,
            trace.status.value,
            float(trace.f_values[-1]),
            trace.n_iters,
            trace.iterations_to(target_value),
            trace.seconds_to(target_value),
            float(trace.seconds[-1]),
            trace_path,
        )

    if cfg.jobs > 1:
        with ThreadPoolExecutor(max_workers=cfg.jobs) as pool:
            records = list(pool.map(_one, tasks))
    else:
        records = [_one(t) for t in tasks]

    result = BenchResult(cfg, records, f_targets)
    _write_results_csv(out / "results.csv", records)
    with open(out / "summary.json", "w") as fh:
        json.dump(
            {
                "problem": {"kind": cfg.problem_kind, "params": cfg.problem_params},
                "dimensions": list(cfg.dimensions),
                "trials": cfg.trials,
                "target": cfg.target,
                "f_star": f_star,
                "seed": cfg.seed,
                "cells": result.aggregates(),
            },
            fh,
            indent=2,
        )
    for plot in cfg.plots:
        kind = PlotKind(plot)
        name = {
            PlotKind.ITER_VS_N: "iter_vs_n.csv",
            PlotKind.TIME_VS_N: "time_vs_n.csv",
            PlotKind.CONVERGENCE: "convergence_curve.csv",
        }[kind]
        emit_plot_data(result, kind, out / name)
    return result


def _write_results_csv(path: Path, records: List[TrialRecord]) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(_CSV_COLUMNS)
        for r in records:
            writer.writerow(
                [
                    r.solver, r.n, r.trial, r.seed, r.status, repr(r.final_f),
                    r.iterations,
                    "" if r.iters_to_target is None else r.iters_to_target,
                    "" if r.seconds_to_target is None else repr(r.seconds_to_target),
                    repr(r.total_seconds),
                    r.trace_path or "",
                ]
            )


class PlotKind(enum.Enum):
    ITER_VS_N = "IterVsN"
    TIME_VS_N = "TimeVsN"
    CONVERGENCE = "ConvergenceCurve"


def _read_trace_f(path: str) -> np.ndarray:
    opener = gzip.open if path.endswith(".gz") else open
    with opener(path, "rt") as fh:
        reader = csv.reader(fh)
        next(reader)
        return np.array([float(row[1]) for row in reader])


def emit_plot_data(result: BenchResult, figure, path) -> None:
    """Long-format CSV (solver, n, statistic, value) for one figure kind.

    IterVsN / TimeVsN emit mean/min/max per cell (non-reaching trials
    censored at their budget); ConvergenceCurve emits, per iteration index,
    the across-trial mean of log10(f - f_target) read back from the trace
    files, floored at 1e-300 before the log.
    """
    if not result.records:
        raise ValueError("cannot emit plot data from an empty result")
    figure = figure if isinstance(figure, PlotKind) else PlotKind(figure)
    rows = []
    for setting in result.config.solvers:
        for n in result.config.dimensions:
            recs = result.cell_records(setting.name, n)
            if not recs:
                continue
            if figure is PlotKind.ITER_VS_N or figure is PlotKind.TIME_VS_N:
                if figure is PlotKind.ITER_VS_N:
                    vals = [
                        r.iters_to_target if r.iters_to_target is not None else r.iterations
                        for r in recs
                    ]
                else:
                    vals = [
                        r.seconds_to_target if r.seconds_to_target is not None else r.total_seconds
                        for r in recs
                    ]
                rows.append((setting.name, n, "mean", float(np.mean(vals))))
                rows.append((setting.name, n, "min", float(np.min(vals))))
                rows.append((setting.name, n, "max", float(np.max(vals))))
            else:
                curves = [
                    _read_trace_f(r.trace_path) for r in recs if r.trace_path is not None
                ]
                if not curves:
                    continue
                f_target = result.f_targets[n] - result.config.target  # back to f_star
                depth = max(len(c) for c in curves)
                for k in range(depth):
                    here = [c[k] for c in curves if len(c) > k]
                    logerr = float(
                        np.mean([math.log10(max(f - f_target, 1e-300)) for f in here])
                    )
                    rows.append((setting.name, n, f"k{k}", logerr))
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["solver", "n", "statistic", "value"])
        for solver, n, stat, value in rows:
            writer.writerow([solver, n, stat, repr(value) if isinstance(value, float) else value])


def run_projection_bench(
    sizes=(1000, 10_000, 100_000),
    repeats: int = 20,
    seed: int = 0,
    out_dir: Optional[str] = None,
):
    """Micro-benchmark of the four projection algorithms on Gaussian inputs.

    Times every (algorithm, backend) pair on each size, reports the median
    over ``repeats`` fresh inputs plus the maximum absolute deviation from a
    reference projection (python sort), and writes projection_bench.csv when
    ``out_dir`` is given.  This is also the compiled-vs-python comparison
    for the optional Cython kernels.
    """
    import time

    from .projection import HAVE_COMPILED, ProjectionAlgo, project_simplex_array

    backends = ["python"] + (["compiled"] if HAVE_COMPILED else [])
    rows = []
    for n in sizes:
        rng = np.random.default_rng(seed)
        inputs = [rng.standard_normal(n) for _ in range(repeats)]
        refs = [project_simplex_array(y, ProjectionAlgo.SORT, backend="python") for y in inputs]
        for algo in ProjectionAlgo:
            for backend in backends:
                times = []
                max_diff = 0.0
                for y, ref in zip(inputs, refs):
                    t0 = time.perf_counter()
                    out = project_simplex_array(y, algo, backend=backend)
                    times.append(time.perf_counter() - t0)
                    max_diff = max(max_diff, float(np.max(np.abs(out - ref))))
                rows.append(
                    {
                        "algorithm": algo.value,
                        "backend": backend,
                        "n": n,
                        "median_seconds": float(np.median(times)),
                        "max_abs_diff_vs_reference": max_diff,
                    }
                )
    if out_dir is not None:
        outp = Path(out_dir)
        outp.mkdir(parents=True, exist_ok=True)
        with open(outp / "projection_bench.csv", "w", newline="") as fh:
            writer = csv.DictWriter(
                fh,
                fieldnames=["algorithm", "backend", "n", "median_seconds", "max_abs_diff_vs_reference"],
            )
            writer.writeheader()
            for row in rows:
                writer.writerow(row)
    return rows
