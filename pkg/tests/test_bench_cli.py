import csv
import json

import numpy as np
import pytest

from hadopt.bench import (
    BenchConfig,
    BenchResult,
    ConfigError,
    PlotKind,
    SolverSetting,
    WALL_CLOCK_COLUMNS,
    emit_plot_data,
    resolve_solver,
    run_bench,
    run_projection_bench,
    run_single,
)
from hadopt.cli import main as cli_main


def small_config(out_dir, **overrides):
    base = dict(
        solvers=(SolverSetting("HadRGD-BB"),),
        dimensions=(20,),
        problem_kind="LeastSquares",
        trials=2,
        target=1e-8,
        out_dir=str(out_dir),
        seed=0,
    )
    base.update(overrides)
    return BenchConfig(**base)


def read_results(out_dir):
    with open(out_dir / "results.csv") as fh:
        return list(csv.reader(fh))


class TestRunSingle:
    def test_smoke(self):
        point, trace, obj, extras = run_single("LeastSquares", 25, "HadRGD-BB", seed=1, target=1e-8)
        assert trace.f_values[-1] <= 1e-8
        assert abs(point.coords.sum() - 1.0) <= 1e-10
        assert "x_true" in extras

    def test_unknown_solver(self):
        with pytest.raises(ConfigError):
            run_single("LeastSquares", 10, "Newton", seed=0)

    def test_solver_name_canonicalization(self):
        assert resolve_solver("hadrgd-bb") == "HadRGD-BB"
        assert resolve_solver("PGD_LS") == "PGD-LS"
        assert resolve_solver("fw") == "FW"
        with pytest.raises(ConfigError):
            resolve_solver("sgd")


class TestRunBench:
    def test_grid_outputs(self, tmp_path):
        cfg = small_config(tmp_path / "out", trials=3)
        result = run_bench(cfg)
        assert len(result.records) == 3
        rows = read_results(tmp_path / "out")
        assert rows[0] == [
            "solver", "n", "trial", "seed", "status", "final_f", "iterations",
            "iters_to_target", "seconds_to_target", "total_seconds", "trace_path",
        ]
        assert len(rows) == 4
        # seeds are global_seed + trial
        assert [r[3] for r in rows[1:]] == ["0", "1", "2"]
        traces = sorted((tmp_path / "out" / "traces").iterdir())
        assert len(traces) == 3

        with open(tmp_path / "out" / "summary.json") as fh:
            summary = json.load(fh)
        (cell,) = summary["cells"]
        assert cell["trials"] == 3
        assert cell["reached_target"] == 3
        assert cell["min_iters"] <= cell["mean_iters"] <= cell["max_iters"]
        assert cell["min_seconds"] <= cell["mean_seconds"] <= cell["max_seconds"]
        assert (tmp_path / "out" / "iter_vs_n.csv").exists()
        assert (tmp_path / "out" / "time_vs_n.csv").exists()

    def test_rerun_identical_outside_wall_clock(self, tmp_path):
        cfg = small_config(tmp_path / "out", trials=2)
        run_bench(cfg)
        first = read_results(tmp_path / "out")
        run_bench(cfg)
        second = read_results(tmp_path / "out")
        header = first[0]
        varying = {header.index(c) for c in WALL_CLOCK_COLUMNS}
        for r1, r2 in zip(first[1:], second[1:]):
            for j, (a, b) in enumerate(zip(r1, r2)):
                if j not in varying:
                    assert a == b, header[j]

    def test_cell_failure_recorded_not_raised(self, tmp_path):
        cfg = small_config(
            tmp_path / "out",
            solvers=(SolverSetting("PGD-LS", options={"base_step": -1.0}),),
            trials=2,
        )
        result = run_bench(cfg)
        assert result.any_errors()
        assert all(r.status == "Error:ValueError" for r in result.records)
        assert all(np.isnan(r.final_f) for r in result.records)
        (cell,) = result.aggregates()
        assert cell["errors"] == 2

    def test_fstar_required_for_random_quadratic(self, tmp_path):
        with pytest.raises(ConfigError):
            small_config(tmp_path / "out", problem_kind="RandomQuadratic")
        cfg = small_config(
            tmp_path / "out", problem_kind="RandomQuadratic", f_star=-1.0, trials=1,
            solvers=(SolverSetting("HadRGD-BB", max_iters=50),),
        )
        run_bench(cfg)  # explicit f_star unblocks the run

    def test_gzip_traces(self, tmp_path):
        cfg = small_config(tmp_path / "out", trials=1, gzip_traces=True)
        result = run_bench(cfg)
        assert result.records[0].trace_path.endswith(".csv.gz")

    def test_threaded_matches_serial(self, tmp_path):
        cfg1 = small_config(tmp_path / "a", trials=4, jobs=1)
        cfg4 = small_config(tmp_path / "b", trials=4, jobs=4)
        r1 = run_bench(cfg1)
        r4 = run_bench(cfg4)
        k1 = sorted((r.solver, r.n, r.trial, r.final_f, r.iterations) for r in r1.records)
        k4 = sorted((r.solver, r.n, r.trial, r.final_f, r.iterations) for r in r4.records)
        assert k1 == k4


class TestPlotData:
    def test_iter_vs_n_rows(self, tmp_path):
        cfg = small_config(tmp_path / "out", trials=3)
        result = run_bench(cfg)
        path = tmp_path / "plot.csv"
        emit_plot_data(result, PlotKind.ITER_VS_N, path)
        rows = list(csv.reader(open(path)))
        assert rows[0] == ["solver", "n", "statistic", "value"]
        assert [r[2] for r in rows[1:]] == ["mean", "min", "max"]
        vals = [float(r[3]) for r in rows[1:]]
        assert vals[1] <= vals[0] <= vals[2]

    def test_convergence_curve_rows(self, tmp_path):
        cfg = small_config(tmp_path / "out", trials=2)
        result = run_bench(cfg)
        path = tmp_path / "curve.csv"
        emit_plot_data(result, "ConvergenceCurve", path)
        rows = list(csv.reader(open(path)))[1:]
        assert rows[0][2] == "k0"
        assert len(rows) == 1 + max(r.iterations for r in result.records)
        # log10 error decreases overall
        assert float(rows[-1][3]) < float(rows[0][3])

    def test_empty_result_rejected(self, tmp_path):
        cfg = small_config(tmp_path / "out")
        with pytest.raises(ValueError):
            emit_plot_data(BenchResult(cfg, [], {}), PlotKind.ITER_VS_N, tmp_path / "x.csv")


class TestProjectionBench:
    def test_rows_and_file(self, tmp_path):
        rows = run_projection_bench(sizes=(256,), repeats=2, seed=0, out_dir=str(tmp_path))
        assert (tmp_path / "projection_bench.csv").exists()
        algos = {r["algorithm"] for r in rows}
        assert len(algos) == 4
        for r in rows:
            assert r["backend"] in ("compiled", "python")
            assert r["median_seconds"] > 0.0
            assert r["max_abs_diff_vs_reference"] <= 1e-9


class TestCli:
    def write(self, path, payload):
        path.write_text(json.dumps(payload))
        return str(path)

    def test_bench_success(self, tmp_path, capsys):
        cfg = self.write(
            tmp_path / "cfg.json",
            {
                "problem": {"kind": "least-squares"},
                "solvers": ["HadRGD-BB"],
                "dimensions": [20],
                "trials": 2,
            },
        )
        rc = cli_main(["bench", "--config", cfg, "--out", str(tmp_path / "out")])
        assert rc == 0
        assert (tmp_path / "out" / "results.csv").exists()
        assert "reached 2/2" in capsys.readouterr().out

    def test_bench_unknown_key(self, tmp_path, capsys):
        cfg = self.write(tmp_path / "cfg.json", {"dimensons": [10], "solvers": ["FW"]})
        assert cli_main(["bench", "--config", cfg]) == 1
        assert "unknown config keys" in capsys.readouterr().err

    def test_bench_solver_failure_exit_2(self, tmp_path, capsys):
        cfg = self.write(
            tmp_path / "cfg.json",
            {
                "problem": "least-squares",
                "solvers": [{"name": "PGD-LS", "options": {"base_step": -1.0}}],
                "dimensions": [10],
                "trials": 1,
            },
        )
        rc = cli_main(["bench", "--config", cfg, "--out", str(tmp_path / "out")])
        assert rc == 2
        assert "failed" in capsys.readouterr().err

    def test_bench_missing_config_file(self, tmp_path, capsys):
        assert cli_main(["bench", "--config", str(tmp_path / "nope.json")]) == 1

    def test_bench_invalid_json(self, tmp_path, capsys):
        p = tmp_path / "bad.json"
        p.write_text("{not json")
        assert cli_main(["bench", "--config", str(p)]) == 1

    def test_kkt_check_explicit_point(self, tmp_path, capsys):
        n = 10
        cfg = self.write(
            tmp_path / "cfg.json",
            {
                "problem": {"kind": "least-squares", "n": n},
                "point": [1.0 / n] * n,
            },
        )
        rc = cli_main(["kkt-check", "--config", cfg, "--out", str(tmp_path / "out")])
        assert rc == 0
        with open(tmp_path / "out" / "kkt_report.json") as fh:
            payload = json.load(fh)
        assert set(payload) == {"sphere", "simplex"}
        assert payload["simplex"]["verdict"] in (
            "NotStationary", "FirstOrderKKT", "SecondOrderKKT", "StrictSaddle", "NonDegenerate",
        )

    def test_kkt_check_solved_point(self, tmp_path, capsys):
        cfg = self.write(
            tmp_path / "cfg.json",
            {"problem": {"kind": "least-squares", "n": 15}, "solver": "HadRGD-BB"},
        )
        rc = cli_main(["kkt-check", "--config", cfg, "--out", str(tmp_path / "out")])
        assert rc == 0
        with open(tmp_path / "out" / "kkt_report.json") as fh:
            payload = json.load(fh)
        assert payload["sphere"]["first_order"] is True

    def test_trace_command(self, tmp_path, capsys):
        cfg = self.write(
            tmp_path / "cfg.json",
            {"problem": {"kind": "least-squares", "n": 12}, "solver": "HadRGD", "max_iters": 40},
        )
        rc = cli_main(["trace", "--config", cfg, "--out", str(tmp_path / "out")])
        assert rc == 0
        lines = (tmp_path / "out" / "trace.csv").read_text().strip().split("\n")
        assert lines[0] == "iteration,f,grad_norm,step,seconds,backtracks"
        assert len(lines) >= 2

    def test_trace_unknown_solver(self, tmp_path, capsys):
        cfg = self.write(
            tmp_path / "cfg.json", {"problem": {"kind": "least-squares", "n": 12}, "solver": "adam"}
        )
        assert cli_main(["trace", "--config", cfg]) == 1

    def test_project_bench_command(self, tmp_path, capsys):
        cfg = self.write(tmp_path / "cfg.json", {"sizes": [128], "repeats": 2})
        rc = cli_main(["project-bench", "--config", cfg, "--out", str(tmp_path)])
        assert rc == 0
        assert (tmp_path / "projection_bench.csv").exists()
