import numpy as np
import pytest

from kernmol.dae import IntegratorConfig, consistent_initialize, integrate
from kernmol.driver import (AdaptiveConfig, rmse_at, solve_adaptive, time_grid)
from kernmol.errors import AdaptiveSolveError
from kernmol.interp import KernelInterpolator
from kernmol.mol import (DirichletBC, ProblemDef, assemble, initial_coefficients,
                         nodal_values)
from kernmol.problems import burgers_moving_front
from kernmol.refine import PointSet, RefineConfig, refine_loop


def zero_stationary_problem(t_final=0.5):
    """u0 harmonic for L, f = g = 0: the zero solution never moves."""
    return ProblemDef(
        name="zero-stationary", a=0.0, b=1.0, t0=0.0, t_final=t_final, nu=0.5,
        pde_rhs=lambda u, ux, uxx, x, t: 0.5 * uxx,
        bc_left=DirichletBC(lambda x, t: 0.0),
        bc_right=DirichletBC(lambda x, t: 0.0),
        u0=lambda x: np.zeros_like(np.asarray(x, dtype=float)),
        exact=lambda x, t: np.zeros_like(np.asarray(x, dtype=float)),
    )


def linear_stationary_problem(t_final=0.5):
    """Nonzero harmonic profile; stationary up to kernel discretization error."""
    star = lambda x: 0.3 + 0.4 * np.asarray(x, dtype=float)
    return ProblemDef(
        name="linear-stationary", a=0.0, b=1.0, t0=0.0, t_final=t_final, nu=0.5,
        pde_rhs=lambda u, ux, uxx, x, t: 0.5 * uxx,
        bc_left=DirichletBC(lambda x, t: 0.3),
        bc_right=DirichletBC(lambda x, t: 0.7),
        u0=star, exact=lambda x, t: star(x),
    )


class TestRmseAt:
    def test_exact_samples_give_zero(self):
        pts = np.linspace(0, 1, 9)
        exact = lambda x, t: np.sin(x + t)
        assert rmse_at(pts, exact(pts, 0.7), exact, 0.7) == 0.0

    def test_constant_offset(self):
        pts = np.linspace(0, 1, 12)
        exact = lambda x, t: np.cos(x)
        delta = 3.7e-3
        assert rmse_at(pts, exact(pts, 0.0) + delta, exact, 0.0) == pytest.approx(delta)

    def test_matches_direct_formula(self):
        rng = np.random.default_rng(0)
        pts = np.sort(rng.uniform(0, 1, 7))
        approx = rng.standard_normal(7)
        exact_vals = rng.standard_normal(7)
        exact = lambda x, t: exact_vals
        direct = np.sqrt(sum(abs(exact_vals[i] - approx[i]) ** 2 for i in range(7)) / 7)
        assert rmse_at(pts, approx, exact, 0.0) == pytest.approx(direct, rel=1e-14)


class TestTimeGrid:
    def test_endpoints_and_count(self):
        prob = zero_stationary_problem(t_final=2.0)
        ts = time_grid(prob, 5)
        assert ts.size == 6
        assert ts[0] == prob.t0
        assert ts[-1] == pytest.approx(prob.t_final)
        np.testing.assert_allclose(np.diff(ts), 0.4)


class TestStationary:
    def test_zero_solution_stays_on_base_grid(self):
        prob = zero_stationary_problem()
        cfg = AdaptiveConfig(m_levels=3, eps0=0.75, refine=RefineConfig(tau=1e-6),
                             n_init=13)
        rep = solve_adaptive(prob, cfg)
        assert rep.status == "completed"
        assert len(rep.levels) == 4
        for rec in rep.levels:
            assert rec.n_fin == 13
            np.testing.assert_array_equal(rec.points, rep.levels[0].points)
            assert rec.rmse <= 1e-6

    def test_linear_profile_point_sets_stay_fixed(self):
        prob = linear_stationary_problem()
        cfg = AdaptiveConfig(m_levels=4, eps0=0.75, refine=RefineConfig(tau=1e-3),
                             n_init=13)
        rep = solve_adaptive(prob, cfg)
        assert rep.status == "completed"
        for rec in rep.levels:
            np.testing.assert_array_equal(rec.points, rep.levels[0].points)
            # drift settles at the discrete steady state, O(interp error)
            assert rec.rmse <= 1e-3


class TestRefinementDisabled:
    def test_reduces_to_fixed_grid_mol(self):
        prob = linear_stationary_problem(t_final=0.3)
        n = 11
        cfg = AdaptiveConfig(m_levels=3, eps0=0.75,
                             refine=RefineConfig(tau=np.inf), n_init=n)
        rep = solve_adaptive(prob, cfg)
        assert all(rec.n_fin == n for rec in rep.levels)

        # scripted fixed-grid run following the same per-level operations
        ps = PointSet.uniform(prob.a, prob.b, n)
        sd = assemble(prob, ps, cfg.eps0)
        ts = time_grid(prob, cfg.m_levels)
        c = initial_coefficients(sd, prob)
        c = consistent_initialize(sd, prob, c, ts[0])
        rmses = [rmse_at(ps.points, nodal_values(sd, c), prob.exact, ts[0])]
        for k in range(1, ts.size):
            c = integrate(sd, prob, c, float(ts[k - 1]), float(ts[k]), cfg.integ).c_end
            u_hat = nodal_values(sd, c)
            carrier = KernelInterpolator(eps0=cfg.eps0).fit(ps.points, u_hat)
            rr = refine_loop(ps, lambda q, s=carrier: s.predict(q.points),
                             cfg.eps0, cfg.refine)
            c = consistent_initialize(sd, prob, rr.interpolant.alpha_, float(ts[k]))
            rmses.append(rmse_at(ps.points, nodal_values(sd, c), prob.exact, ts[k]))
        for rec, ref in zip(rep.levels, rmses):
            assert abs(rec.rmse - ref) <= 1e-12


@pytest.fixture(scope="module")
def front_report():
    prob = burgers_moving_front(t_final=0.4)
    cfg = AdaptiveConfig(m_levels=8, eps0=0.75, refine=RefineConfig(tau=1e-3),
                         n_init=13)
    return solve_adaptive(prob, cfg), cfg


class TestDriverInvariants:
    def test_boundaries_present_every_level(self, front_report):
        rep, _ = front_report
        for rec in rep.levels:
            assert rec.points[0] == 0.0
            assert rec.points[-1] == 1.0

    def test_converged_levels_meet_indicator_threshold(self, front_report):
        rep, cfg = front_report
        for rec in rep.levels:
            assert rec.refine_status == "converged"
            it = KernelInterpolator(eps0=cfg.eps0).fit(rec.points, rec.values)
            # recorded values differ from the refine-loop samples only by the
            # boundary projection, so allow a hair of slack
            assert it.loocv_errors().max() <= cfg.refine.tau * 1.05

    def test_records_are_time_ordered_and_complete(self, front_report):
        rep, cfg = front_report
        assert len(rep.levels) == cfg.m_levels + 1
        ts = [rec.t for rec in rep.levels]
        assert ts == sorted(ts)
        for rec in rep.levels:
            assert rec.points.size == rec.values.size == rec.n_fin
            assert rec.cond >= 1.0
            assert rec.rmse is None  # no exact solution for this benchmark


class TestSolutionTransfer:
    def test_transfer_preserves_previous_nodal_values(self):
        # one level done manually in insertion-only mode: the refined set
        # contains the old points, whose values must survive the transfer
        prob = burgers_moving_front(t_final=0.2)
        eps0 = 0.75
        ps = PointSet.uniform(0, 1, 13)
        sd = assemble(prob, ps, eps0)
        c = initial_coefficients(sd, prob)
        c = consistent_initialize(sd, prob, c, 0.0)
        c = integrate(sd, prob, c, 0.0, 0.05, IntegratorConfig()).c_end
        u_old = nodal_values(sd, c)
        carrier = KernelInterpolator(eps0=eps0).fit(ps.points, u_old)
        rr = refine_loop(ps, lambda q: carrier.predict(q.points), eps0,
                         RefineConfig(tau=1e-3))
        assert rr.point_set.n > ps.n
        sd_new = assemble(prob, rr.point_set, eps0)
        c_new = consistent_initialize(sd_new, prob, rr.interpolant.alpha_, 0.05)
        it_new = KernelInterpolator(eps0=eps0).fit(rr.point_set.points,
                                                   nodal_values(sd_new, c_new))
        scale = np.max(np.abs(u_old))
        diff = np.abs(it_new.predict(ps.points[1:-1]) - u_old[1:-1])
        assert np.max(diff) <= 1e-7 * scale


class TestFailurePropagation:
    def test_budget_failure_returns_partial_report_with_flagged_record(self):
        prob = burgers_moving_front(t_final=0.6)
        cfg = AdaptiveConfig(m_levels=12, eps0=0.75,
                             refine=RefineConfig(tau=1e-3, max_points=90), n_init=13)
        with pytest.raises(AdaptiveSolveError) as exc:
            solve_adaptive(prob, cfg)
        err = exc.value
        assert err.level == 3
        rep = err.partial_report
        assert rep.status.startswith("failed at level 3")
        assert len(rep.levels) == 4  # 3 completed + the flagged one
        assert rep.levels[-1].refine_status == "budget"
        for rec in rep.levels[:-1]:
            assert rec.refine_status == "converged"

    def test_budget_failure_at_level_zero_has_empty_report(self):
        prob = burgers_moving_front(t_final=0.6)
        cfg = AdaptiveConfig(m_levels=2, eps0=0.75,
                             refine=RefineConfig(tau=1e-3, max_points=40), n_init=13)
        with pytest.raises(AdaptiveSolveError) as exc:
            solve_adaptive(prob, cfg)
        assert exc.value.level == 0
        assert exc.value.partial_report.levels == []


class TestAdaptiveConfigValidation:
    def test_rejects_bad_values(self):
        refine = RefineConfig(tau=1e-3)
        with pytest.raises(ValueError):
            AdaptiveConfig(m_levels=0, eps0=0.75, refine=refine)
        with pytest.raises(ValueError):
            AdaptiveConfig(m_levels=3, eps0=0.75, refine=refine, n_init=2)
        with pytest.raises(ValueError):
            AdaptiveConfig(m_levels=3, eps0=-1.0, refine=refine)
        with pytest.raises(ValueError, match="max_points"):
            AdaptiveConfig(m_levels=3, eps0=0.75,
                           refine=RefineConfig(tau=1e-3, max_points=10), n_init=13)
