"""Command-line entry point.

Subcommands: ``bench`` (solver-by-dimension grid), ``project-bench``
(projection micro-benchmark, compiled vs python kernels), ``kkt-check``
(stationarity certificates for a problem/point), ``trace`` (single solver
run to a trace CSV).  Exit codes: 0 success, 1 config error, 2 solver
failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import bench as bench_mod
from .bench import BenchConfig, ConfigError, run_bench, run_projection_bench, run_single
from .hadamard import hadamard_sqrt
from .kkt import kkt_check_simplex, kkt_check_sphere
from .problems import ProblemSpec

_DESCRIPTION = "Benchmarks and diagnostics for simplex-constrained optimization."


def _load_json(path) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as e:
        raise ConfigError(f"cannot read config {path}: {e}") from None
    except json.JSONDecodeError as e:
        raise ConfigError(f"config {path} is not valid JSON: {e}") from None


def _add_common(p: argparse.ArgumentParser, config_required: bool) -> None:
    p.add_argument("--config", required=config_required, help="path to a JSON config file")
    p.add_argument("--out", default=None, help="output directory")
    p.add_argument("--seed", type=int, default=None, help="global seed override")
    p.add_argument("--jobs", type=int, default=None, help="worker threads (default 1)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hadopt", description=_DESCRIPTION)
    sub = parser.add_subparsers(dest="command", required=True)
    _add_common(sub.add_parser("bench", help="run a solver x dimension benchmark grid"), True)
    _add_common(
        sub.add_parser("project-bench", help="time the four simplex projection kernels"), False
    )
    _add_common(sub.add_parser("kkt-check", help="stationarity certificates for a point"), True)
    _add_common(sub.add_parser("trace", help="one solver run, written as a trace CSV"), True)
    return parser


def _cmd_bench(args) -> int:
    cfg = BenchConfig.from_dict(_load_json(args.config), args.out, args.seed, args.jobs)
    result = run_bench(cfg)
    cells = result.aggregates()
    for cell in cells:
        print(
            f"{cell['solver']:>10} n={cell['n']:<7} reached {cell['reached_target']}/{cell['trials']}"
            f"  mean iters {cell['mean_iters']:.1f}  mean final f {cell['mean_final_f']:.3e}"
        )
    print(f"results written to {cfg.out_dir}")
    if result.any_errors():
        bad = [r for r in result.records if r.status.startswith("Error")]
        print(f"{len(bad)} trial(s) failed; see results.csv status column", file=sys.stderr)
        return 2
    return 0


def _cmd_project_bench(args) -> int:
    raw = _load_json(args.config) if args.config else {}
    if not isinstance(raw, dict):
        raise ConfigError("project-bench config must be a JSON object")
    sizes = tuple(int(n) for n in raw.get("sizes", (1000, 10_000, 100_000)))
    repeats = int(raw.get("repeats", 20))
    if repeats < 1 or any(n < 1 for n in sizes):
        raise ConfigError("sizes and repeats must be positive")
    seed = args.seed if args.seed is not None else int(raw.get("seed", 0))
    out = args.out if args.out is not None else raw.get("out_dir", ".")
    rows = run_projection_bench(sizes, repeats, seed, out)
    print(f"{'algorithm':<15}{'backend':<10}{'n':>8}  {'median s':>12}  {'max |diff|':>10}")
    for r in rows:
        print(
            f"{r['algorithm']:<15}{r['backend']:<10}{r['n']:>8}  "
            f"{r['median_seconds']:>12.3e}  {r['max_abs_diff_vs_reference']:>10.2e}"
        )
    print(f"table written to {Path(out) / 'projection_bench.csv'}")
    return 0


def _cmd_kkt_check(args) -> int:
    raw = _load_json(args.config)
    problem = raw.get("problem")
    if not isinstance(problem, dict) or "n" not in problem:
        raise ConfigError("kkt-check config needs a 'problem' object with 'n'")
    tol = float(raw.get("tol", 1e-6))
    seed = args.seed if args.seed is not None else int(raw.get("seed", problem.get("seed", 0)))
    try:
        spec = ProblemSpec(
            problem.get("kind", "LeastSquares"),
            int(problem["n"]),
            seed,
            dict(problem.get("params", {})),
        )
    except ValueError as e:
        raise ConfigError(str(e)) from None
    obj, _, _ = spec.build()

    if "point" in raw:
        x = np.asarray(raw["point"], dtype=float)
        if x.shape != (spec.n,):
            raise ConfigError(f"'point' must have length {spec.n}")
    else:
        solver = raw.get("solver", "HadRGD-BB")
        options = dict(raw.get("options", {}))
        options.setdefault("grad_tol", 1e-9)
        point, _, _, _ = run_single(
            spec.kind, spec.n, solver, seed, options,
            max_iters=raw.get("max_iters"), problem_params=spec.params,
        )
        x = point.coords
    z = hadamard_sqrt(x)
    sphere = kkt_check_sphere(obj, z, tol)
    simplex = kkt_check_simplex(obj, x, tol)
    payload = {"sphere": sphere.to_dict(), "simplex": simplex.to_dict()}
    out = Path(args.out or ".")
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "kkt_report.json", "w") as fh:
        json.dump(payload, fh, indent=2)
    print(f"sphere:  {sphere.verdict.value}  (stationarity {sphere.stationarity_residual:.3e})")
    print(f"simplex: {simplex.verdict.value}  (stationarity {simplex.stationarity_residual:.3e})")
    print(f"report written to {out / 'kkt_report.json'}")
    return 0


def _cmd_trace(args) -> int:
    raw = _load_json(args.config)
    problem = raw.get("problem")
    if not isinstance(problem, dict) or "n" not in problem:
        raise ConfigError("trace config needs a 'problem' object with 'n'")
    solver = raw.get("solver")
    if not solver:
        raise ConfigError("trace config needs a 'solver' name")
    bench_mod.resolve_solver(solver)
    seed = args.seed if args.seed is not None else int(raw.get("seed", problem.get("seed", 0)))
    try:
        spec = ProblemSpec(
            problem.get("kind", "LeastSquares"),
            int(problem["n"]),
            seed,
            dict(problem.get("params", {})),
        )
    except ValueError as e:
        raise ConfigError(str(e)) from None
    point, trace, _, _ = run_single(
        spec.kind,
        spec.n,
        solver,
        seed,
        dict(raw.get("options", {})),
        max_iters=raw.get("max_iters"),
        target=raw.get("target"),
        f_star=raw.get("f_star"),
        problem_params=spec.params,
    )
    out = Path(args.out or ".")
    out.mkdir(parents=True, exist_ok=True)
    path = out / "trace.csv"
    with open(path, "w", newline="") as fh:
        trace.to_csv(fh)
    print(
        f"{solver}: {trace.status.value} after {trace.n_iters} iterations, "
        f"final f {trace.f_values[-1]!r}"
    )
    print(f"trace written to {path}")
    return 0


_COMMANDS = {
    "bench": _cmd_bench,
    "project-bench": _cmd_project_bench,
    "kkt-check": _cmd_kkt_check,
    "trace": _cmd_trace,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return 1
    except Exception as e:  # solver or IO failure after a valid config
        print(f"error: {type(e).__name__}: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
