import numpy as np
import pytest

from hadopt import (
    AwConfig,
    BbConfig,
    Objective,
    PrgdConfig,
    PullbackObjective,
    RgdConfig,
    SimplexPoint,
    Status,
    exp_map,
    gen_strict_saddle,
    had_prgd,
    had_rgd,
    had_rgd_aw,
    had_rgd_bb,
    had_rgd_bb_sphere,
    riemannian_gradient,
    sphere_geodesic,
    tangent_space_steps,
    transfer_lipschitz,
    uniform_simplex,
    uniform_tangent_ball,
)
from oracles import quad_objective


def distance_objective(u):
    """f(x) = ||x - u||^2 with its unique minimizer at u."""
    u = np.asarray(u, dtype=float)
    return Objective(
        dim=u.shape[0],
        value=lambda x: float(np.sum((x - u) ** 2)),
        gradient=lambda x: 2.0 * (x - u),
        hessian_vec=lambda x, d: 2.0 * d,
        lipschitz_grad=2.0,
        grad_inf_bound=2.0 * 2.0,  # |x - u| <= 2 coordinatewise on the simplex
    )


def interior_target(n, seed=0):
    rng = np.random.default_rng(seed)
    u = rng.exponential(size=n)
    return u / u.sum()


class TestConfigValidation:
    def test_rgd(self):
        with pytest.raises(ValueError):
            RgdConfig(step_size=0.0)
        with pytest.raises(ValueError):
            RgdConfig(step_size=1.0, max_iters=0)
        with pytest.raises(ValueError):
            RgdConfig(step_size=1.0, grad_tol=-1.0)

    def test_prgd(self):
        with pytest.raises(ValueError):
            PrgdConfig(step_size=1.0, tangent_iters=0)
        with pytest.raises(ValueError):
            PrgdConfig(step_size=1.0, perturb_threshold=0.0)
        PrgdConfig(step_size=1.0, perturb_radius=0.0)  # zero radius = disabled
        c = PrgdConfig(step_size=0.5, grad_tol=1e-6).resolved()
        assert c.perturb_threshold == pytest.approx(1e-5)
        assert c.perturb_radius == c.perturb_threshold
        assert c.tangent_step == 0.5
        assert c.escape_radius == pytest.approx(np.sqrt(c.perturb_threshold))

    def test_aw(self):
        with pytest.raises(ValueError):
            AwConfig(default_step=1.0, armijo=0.5, wolfe=0.4)
        with pytest.raises(ValueError):
            AwConfig(default_step=1.0, decay=1.0)
        cfg = AwConfig.for_least_squares(n=500, L=10.0)
        assert cfg.default_step == pytest.approx(10.0 * np.sqrt(20 * 500 / 10.0))
        assert (cfg.decay, cfg.armijo, cfg.wolfe) == (0.75, 1e-4, 0.9)
        cfgb = AwConfig.for_least_squares(n=500, L=10.0, boundary=True)
        assert cfgb.default_step == pytest.approx(10.0 * np.sqrt(2 * 500 / 10.0))

    def test_bb(self):
        with pytest.raises(ValueError):
            BbConfig(clamp=(1.0, 0.5))
        with pytest.raises(ValueError):
            BbConfig(average_weight=0.0)
        cfg = BbConfig.for_least_squares(n=100, L=4.0)
        assert (cfg.default_step, cfg.decay, cfg.average_weight, cfg.tolerance) == (
            3.0,
            0.5,
            0.5,
            0.1,
        )
        cfgb = BbConfig.for_least_squares(n=100, L=4.0, boundary=True)
        assert cfgb.default_step == pytest.approx(10.0 * np.sqrt(200 / 4.0))
        assert cfgb.decay == 0.75


class TestHadRgd:
    def test_stationary_start_converges_immediately(self):
        # f constant on the simplex: the pullback gradient is radial
        c = np.ones(5)
        f = Objective(dim=5, value=lambda x: float(c @ x), gradient=lambda x: c.copy())
        pt, tr = had_rgd(f, uniform_simplex(5), RgdConfig(step_size=0.1))
        assert tr.status is Status.CONVERGED
        assert len(tr) == 1

    def test_converges_to_interior_minimizer(self):
        n = 20
        u = interior_target(n)
        f = distance_objective(u)
        step = 1.0 / transfer_lipschitz(f.lipschitz_grad, f.grad_inf_bound)
        pt, tr = had_rgd(f, uniform_simplex(n), RgdConfig(step_size=step, max_iters=4000, grad_tol=1e-10))
        # the rate is sublinear near the smallest coordinates of u
        assert f.value(pt.coords) <= 1e-6
        assert np.max(np.abs(pt.coords - u)) <= 1e-3
        assert tr.f_values[-1] < tr.f_values[0] * 1e-4

    def test_trace_shape_and_monotone_clock(self):
        f = distance_objective(interior_target(6))
        _, tr = had_rgd(f, uniform_simplex(6), RgdConfig(step_size=0.05, max_iters=50, grad_tol=0.0))
        assert np.all(np.diff(tr.iterations) > 0)
        assert np.all(np.diff(tr.seconds) >= 0.0)
        assert len(tr) == 51  # row 0 plus one row per iteration

    def test_target_value_stop(self):
        f = distance_objective(interior_target(8))
        _, tr = had_rgd(
            f, uniform_simplex(8), RgdConfig(step_size=0.1, max_iters=2000, grad_tol=0.0, target_value=1e-4)
        )
        assert tr.status is Status.CONVERGED
        assert tr.f_values[-1] <= 1e-4

    def test_zero_grad_tol_disables_gradient_stop(self):
        f = gen_strict_saddle(10)
        _, tr = had_rgd(f, uniform_simplex(10), RgdConfig(step_size=0.05, max_iters=30, grad_tol=0.0))
        # the gradient is exactly zero at the uniform saddle, yet the run
        # must use its full budget
        assert tr.status is Status.MAX_ITERS
        assert tr.iterations[-1] == 30

    def test_deterministic(self):
        f = distance_objective(interior_target(12, seed=3))
        cfg = RgdConfig(step_size=0.08, max_iters=200, grad_tol=1e-9)
        _, t1 = had_rgd(f, uniform_simplex(12), cfg)
        _, t2 = had_rgd(f, uniform_simplex(12), cfg)
        np.testing.assert_array_equal(t1.f_values, t2.f_values)
        np.testing.assert_array_equal(t1.grad_norms, t2.grad_norms)

    def test_iterates_feasible(self):
        f = distance_objective(interior_target(9, seed=4))
        pt, _ = had_rgd(f, uniform_simplex(9), RgdConfig(step_size=0.1, max_iters=100))
        assert abs(np.sum(pt.coords) - 1.0) <= 1e-10
        assert np.min(pt.coords) >= -1e-12


class TestTrace:
    def test_csv_roundtrip(self, tmp_path):
        f = distance_objective(interior_target(5))
        _, tr = had_rgd(f, uniform_simplex(5), RgdConfig(step_size=0.1, max_iters=20, grad_tol=0.0))
        path = tmp_path / "trace.csv"
        tr.to_csv(path)
        lines = path.read_text().strip().split("\n")
        assert lines[0] == "iteration,f,grad_norm,step,seconds,backtracks"
        assert len(lines) == len(tr) + 1
        f_back = np.array([float(l.split(",")[1]) for l in lines[1:]])
        np.testing.assert_array_equal(f_back, tr.f_values)


class TestTangentEpisode:
    def test_stationary_pullback_returns_exp_of_start(self):
        # constant objective: the tangent gradient vanishes, so the episode
        # never moves the tangent iterate
        f = Objective(
            dim=4,
            value=lambda x: 2.0,
            gradient=lambda x: np.zeros(4),
            hessian_vec=lambda x, d: np.zeros(4),
        )
        g = PullbackObjective(f)
        z = np.full(4, 0.5)
        rng = np.random.default_rng(0)
        s0 = rng.standard_normal(4)
        s0 -= np.dot(s0, z) * z
        s0 *= 0.1 / np.linalg.norm(s0)
        out = tangent_space_steps(g, z, s0, PrgdConfig(step_size=0.1, tangent_iters=17))
        np.testing.assert_allclose(out, exp_map(z, s0), atol=1e-12)

    def test_single_step_with_infinite_escape_radius(self):
        f = distance_objective(interior_target(4))
        g = PullbackObjective(f)
        z = np.full(4, 0.5)
        s0 = np.zeros(4)
        cfg = PrgdConfig(step_size=0.1, tangent_step=0.1, escape_radius=np.inf, tangent_iters=1)
        out = tangent_space_steps(g, z, s0, cfg)
        grad = riemannian_gradient(g.gradient, z)
        np.testing.assert_allclose(out, exp_map(z, -0.1 * grad), atol=1e-12)

    def test_negative_curvature_exits_through_radius(self):
        n = 12
        f = gen_strict_saddle(n)
        g = PullbackObjective(f)
        z = np.full(n, 1.0 / np.sqrt(n))
        rng = np.random.default_rng(1)
        s0 = uniform_tangent_ball(rng, z, 1e-3)
        cfg = PrgdConfig(
            step_size=1.0 / 12.0,
            tangent_step=1.0 / 12.0,
            escape_radius=0.05,
            tangent_iters=500,
        )
        out = tangent_space_steps(g, z, s0, cfg)
        # the episode must have moved well beyond the perturbation scale
        assert np.arccos(np.clip(np.dot(out, z), -1, 1)) > 1e-3

    def test_rejects_non_tangent_start(self):
        f = distance_objective(interior_target(4))
        g = PullbackObjective(f)
        z = np.full(4, 0.5)
        with pytest.raises(ValueError):
            tangent_space_steps(g, z, z.copy(), PrgdConfig(step_size=0.1))


class TestHadPrgd:
    def test_zero_radius_reduces_to_rgd(self):
        n = 15
        f = distance_objective(interior_target(n, seed=5))
        base = dict(step_size=0.07, max_iters=300, grad_tol=1e-10)
        _, tp = had_prgd(f, uniform_simplex(n), PrgdConfig(perturb_radius=0.0, **base), rng_seed=9)
        _, tr = had_rgd(f, uniform_simplex(n), RgdConfig(**base))
        assert tp.status == tr.status
        np.testing.assert_array_equal(tp.iterations, tr.iterations)
        np.testing.assert_array_equal(tp.f_values, tr.f_values)
        np.testing.assert_array_equal(tp.grad_norms, tr.grad_norms)
        np.testing.assert_array_equal(tp.steps, tr.steps)

    def test_escapes_uniform_saddle(self):
        n = 20
        f = gen_strict_saddle(n)
        saddle_value = -1.0 / n
        cfg = PrgdConfig(
            step_size=1.0 / 12.0,
            max_iters=2000,
            grad_tol=0.0,
            target_value=-0.5,
            perturb_threshold=1e-3,
            perturb_radius=0.1,
            tangent_step=1.0 / 12.0,
            escape_radius=np.sqrt(1e-3),
            tangent_iters=200,
        )
        pt, tr = had_prgd(f, uniform_simplex(n), cfg, rng_seed=0)
        assert tr.f_values[-1] < saddle_value - 0.1

    def test_stays_without_perturbation(self):
        n = 20
        f = gen_strict_saddle(n)
        cfg = PrgdConfig(step_size=1.0 / 12.0, max_iters=500, grad_tol=0.0, perturb_radius=0.0)
        _, tr = had_prgd(f, uniform_simplex(n), cfg, rng_seed=0)
        assert np.max(np.abs(tr.f_values - (-1.0 / n))) <= 1e-12

    def test_seeded_episodes_reproducible(self):
        f = gen_strict_saddle(10)
        cfg = PrgdConfig(
            step_size=1.0 / 12.0,
            max_iters=400,
            grad_tol=0.0,
            perturb_threshold=1e-3,
            perturb_radius=0.1,
        )
        _, t1 = had_prgd(f, uniform_simplex(10), cfg, rng_seed=7)
        _, t2 = had_prgd(f, uniform_simplex(10), cfg, rng_seed=7)
        np.testing.assert_array_equal(t1.f_values, t2.f_values)
        _, t3 = had_prgd(f, uniform_simplex(10), cfg, rng_seed=8)
        assert not np.array_equal(t1.f_values, t3.f_values)

    def test_uniform_tangent_ball_law(self):
        rng = np.random.default_rng(11)
        z = np.full(4, 0.5)
        draws = np.array([uniform_tangent_ball(rng, z, 0.5) for _ in range(2000)])
        norms = np.linalg.norm(draws, axis=1)
        assert np.max(norms) <= 0.5 + 1e-12
        assert np.max(np.abs(draws @ z)) <= 1e-12
        # P(||xi|| <= t) = (t/r)^(n-1) on the tangent disc: check the median
        assert abs(np.median(norms) - 0.5 * 0.5 ** (1.0 / 3.0)) <= 0.02


class TestHadRgdAw:
    def test_stationary_start(self):
        c = np.ones(4)
        f = Objective(dim=4, value=lambda x: float(c @ x), gradient=lambda x: c.copy())
        _, tr = had_rgd_aw(f, uniform_simplex(4), AwConfig(default_step=1.0))
        assert tr.status is Status.CONVERGED
        assert len(tr) == 1

    def test_accepted_step_satisfies_armijo_directly(self):
        n = 10
        f = distance_objective(interior_target(n, seed=6))
        g = PullbackObjective(f)
        x0 = uniform_simplex(n)
        cfg = AwConfig(default_step=2.0, max_iters=1, grad_tol=0.0, strict_wolfe=True)
        _, tr = had_rgd_aw(f, x0, cfg)
        alpha = tr.steps[1]
        assert tr.backtracks[1] <= cfg.max_backtracks  # search succeeded
        z0 = np.sqrt(np.asarray(x0, dtype=float))
        grad = riemannian_gradient(g.gradient, z0)
        y, ydot = sphere_geodesic(z0, -grad, alpha)
        slope = -float(np.dot(grad, grad))
        assert g.value(y) <= g.value(z0) + cfg.armijo * alpha * slope + 1e-15
        assert float(np.dot(g.gradient(y), ydot)) >= cfg.wolfe * slope

    def test_strict_mode_monotone_when_accepted(self):
        n = 30
        f = distance_objective(interior_target(n, seed=7))
        cfg = AwConfig(default_step=5.0, max_iters=200, grad_tol=1e-10, strict_wolfe=True)
        _, tr = had_rgd_aw(f, uniform_simplex(n), cfg)
        ok = tr.backtracks[1:] <= cfg.max_backtracks
        drops = np.diff(tr.f_values)
        assert np.all(drops[ok] <= 1e-15)

    def test_converges_on_least_squares(self):
        from hadopt import gen_least_squares

        prob, f = gen_least_squares(60, "interior", seed=1)
        cfg = AwConfig.for_least_squares(n=60, L=f.lipschitz_grad, strict_wolfe=True,
                                         grad_tol=0.0, target_value=1e-9, max_iters=500)
        _, tr = had_rgd_aw(f, uniform_simplex(60), cfg)
        assert tr.status is Status.CONVERGED

    def test_line_search_failure_recorded(self):
        # an enormous non-decaying-enough step with no backtracking room
        f = distance_objective(interior_target(6, seed=8))
        cfg = AwConfig(default_step=1e6, max_backtracks=0, max_iters=3, grad_tol=0.0,
                       strict_wolfe=True)
        _, tr = had_rgd_aw(f, uniform_simplex(6), cfg)
        assert tr.status is Status.LINE_SEARCH_FAILED
        assert np.all(tr.backtracks[1:] == 1)  # one past the cap marks failure

    def test_deterministic(self):
        f = distance_objective(interior_target(9, seed=9))
        cfg = AwConfig(default_step=3.0, max_iters=60, grad_tol=0.0)
        _, t1 = had_rgd_aw(f, uniform_simplex(9), cfg)
        _, t2 = had_rgd_aw(f, uniform_simplex(9), cfg)
        np.testing.assert_array_equal(t1.f_values, t2.f_values)


class _ScriptedSphereObjective:
    """Sphere objective with scripted values and a microscopic gradient.

    The gradient scale keeps every curvature pair far below the 1e-30
    denominator floor, exercising the degenerate-denominator step rule.
    """

    def __init__(self, n, scale=1e-20):
        self.n = n
        self.scale = scale
        self.calls = 0

    def value(self, z):
        self.calls += 1
        return 1.0 / self.calls

    def gradient(self, z):
        q = np.zeros(self.n)
        q[0] = self.scale
        return q


class TestHadRgdBb:
    def test_reaches_tight_accuracy_fast(self):
        n = 40
        f = distance_objective(interior_target(n, seed=10))
        _, tr = had_rgd_bb(f, uniform_simplex(n), BbConfig(grad_tol=1e-10, max_iters=500))
        assert tr.status is Status.CONVERGED
        assert tr.iterations[-1] < 200

    def test_nonmonotone_guard_holds(self):
        n = 25
        f = distance_objective(interior_target(n, seed=11))
        cfg = BbConfig(grad_tol=1e-10, max_iters=400)
        _, tr = had_rgd_bb(f, uniform_simplex(n), cfg)
        # rebuild the running average C_k from the accepted f values
        C = tr.f_values[0]
        Q = 1.0
        for k in range(1, len(tr)):
            if tr.backtracks[k] < cfg.max_shrinks:
                lhs = tr.f_values[k]
                rhs = C - cfg.tolerance * tr.steps[k] * tr.grad_norms[k - 1] ** 2
                assert lhs < rhs + 1e-15
            assert np.min(tr.f_values[: k + 1]) <= C + 1e-15
            Qn = cfg.average_weight * Q + 1.0
            C = (cfg.average_weight * Q * C + tr.f_values[k]) / Qn
            Q = Qn

    def test_step_clamped_to_upper_bound(self):
        # nearly flat quadratic: the raw spectral ratio blows past the clamp
        n = 8
        f = quad_objective(1e-8 * np.eye(n), np.zeros(n))
        cfg = BbConfig(grad_tol=0.0, max_iters=3, target_value=-1.0)
        _, tr = had_rgd_bb(f, interior_target(n, seed=12), cfg)
        assert tr.backtracks[2] == 0
        assert tr.steps[2] == cfg.clamp[1]

    def test_zero_denominator_takes_clamp_upper_bound(self):
        g = _ScriptedSphereObjective(6)
        z0 = np.full(6, 1.0 / np.sqrt(6.0))
        cfg = BbConfig(grad_tol=0.0, max_iters=2)
        _, tr = had_rgd_bb_sphere(g, z0, cfg)
        assert tr.steps[2] == cfg.clamp[1] == 30.0
        assert tr.backtracks[2] == 0

    def test_shrink_cap_failure_recorded(self):
        # value scripted to always increase: no shrink can ever be accepted
        class Rising:
            def __init__(self):
                self.k = 0

            def value(self, z):
                self.k += 1
                return float(self.k)

            def gradient(self, z):
                q = np.ones(6)
                return q

        cfg = BbConfig(grad_tol=0.0, max_iters=1, max_shrinks=5)
        _, tr = had_rgd_bb_sphere(Rising(), np.full(6, 1.0 / np.sqrt(6.0)), cfg)
        assert tr.status is Status.LINE_SEARCH_FAILED
        assert tr.backtracks[1] == cfg.max_shrinks

    def test_sphere_entry_normalizes(self):
        f = distance_objective(interior_target(5, seed=13))
        g = PullbackObjective(f)
        z, tr = had_rgd_bb_sphere(g, np.ones(5), BbConfig(max_iters=5, grad_tol=0.0))
        assert abs(np.linalg.norm(z) - 1.0) <= 1e-10

    def test_deterministic(self):
        f = distance_objective(interior_target(14, seed=14))
        cfg = BbConfig(grad_tol=0.0, max_iters=80)
        _, t1 = had_rgd_bb(f, uniform_simplex(14), cfg)
        _, t2 = had_rgd_bb(f, uniform_simplex(14), cfg)
        np.testing.assert_array_equal(t1.f_values, t2.f_values)
        np.testing.assert_array_equal(t1.steps, t2.steps)
