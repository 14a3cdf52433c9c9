"""The outer adaptive time-marching loop.

Per time level: integrate the DAE across the level, interpolate the nodal
solution, rerun the refinement iteration against that interpolant, transfer
the solution to the refined set, and record metrics (final point count,
refinement iterations, RMSE against the exact solution when one exists, the
2-norm condition number of the collocation matrix, and wall-clock time).

By default every level restarts refinement from the uniform base grid, with
the solution carried by the level's interpolant.  This lets the final point
count *decrease* when the solution smooths out, which pure insertion cannot
do; ``restart_from_base=False`` selects literal insertion-only refinement.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .dae import IntegratorConfig, consistent_initialize, integrate
from .densela import cond2
from .errors import (AdaptiveSolveError, BlowUpError, BudgetExhaustedError,
                     ConditioningError, DegenerateIndicatorError, KernmolError,
                     StiffFailureError)
from .interp import KernelInterpolator
from .mol import ProblemDef, assemble, initial_coefficients, nodal_values
from .refine import PointSet, RefineConfig, refine_loop


@dataclass(frozen=True)
class AdaptiveConfig:
    """Settings for one adaptive run."""

    m_levels: int
    eps0: float
    refine: RefineConfig
    n_init: int = 13
    integ: IntegratorConfig = IntegratorConfig()
    restart_from_base: bool = True

    def __post_init__(self):
        if self.n_init < 3:
            raise ValueError("n_init must be >= 3")
        if self.m_levels < 1:
            raise ValueError("m_levels must be >= 1")
        if not (self.eps0 > 0):
            raise ValueError("eps0 must be positive")
        if self.refine.max_points < self.n_init:
            raise ValueError(
                f"max_points ({self.refine.max_points}) below the initial point "
                f"count ({self.n_init})"
            )


@dataclass
class LevelRecord:
    t: float
    n_fin: int
    refine_iters: int
    rmse: Optional[float]
    cond: float
    cpu_seconds: float
    points: np.ndarray
    values: np.ndarray
    refine_status: str  # "converged" | "max_iters" | "budget"


@dataclass
class RunReport:
    problem_name: str
    config: AdaptiveConfig
    levels: list[LevelRecord] = field(default_factory=list)
    status: str = "running"


def rmse_at(points, approx, exact, t: float) -> float:
    """Root mean square error of nodal values against ``exact(x, t)``."""
    points = np.asarray(points, dtype=float)
    approx = np.asarray(approx, dtype=float)
    diff = exact(points, t) - approx
    return float(np.sqrt(np.mean(np.abs(diff) ** 2)))


def time_grid(problem: ProblemDef, m_levels: int) -> np.ndarray:
    """Uniform levels t_n = t0 + n (T - t0) / M for n = 0..M."""
    return problem.t0 + np.arange(m_levels + 1) * (
        (problem.t_final - problem.t0) / m_levels
    )


def _make_record(problem, sd, c, t, refine_iters, status, cpu) -> LevelRecord:
    vals = nodal_values(sd, c)
    rmse = rmse_at(sd.point_set.points, vals, problem.exact, t) if problem.exact else None
    return LevelRecord(
        t=float(t), n_fin=sd.n, refine_iters=refine_iters, rmse=rmse,
        cond=cond2(sd.k_id), cpu_seconds=cpu,
        points=sd.point_set.points.copy(), values=vals, refine_status=status,
    )


def solve_adaptive(problem: ProblemDef, cfg: AdaptiveConfig) -> RunReport:
    """Run the adaptive solver over the whole time window.

    Returns a complete ``RunReport``; on a numerical failure raises
    ``AdaptiveSolveError`` carrying the level index and the partial report
    (every completed level, plus a budget-flagged record when refinement ran
    out of points).
    """
    ts = time_grid(problem, cfg.m_levels)
    base = PointSet.uniform(problem.a, problem.b, cfg.n_init)
    report = RunReport(problem_name=problem.name, config=cfg)

    def fail(level: int, err: Exception):
        report.status = f"failed at level {level}: {err}"
        raise AdaptiveSolveError(level, report, err)

    # level 0: refine directly against the initial profile
    tic = time.perf_counter()
    u0_provider = lambda q: np.asarray(problem.u0(q.points), dtype=float)
    try:
        rr = refine_loop(base, u0_provider, cfg.eps0, cfg.refine)
        ps = rr.point_set
        sd = assemble(problem, ps, cfg.eps0)
        c = initial_coefficients(sd, problem)
        c = consistent_initialize(sd, problem, c, ts[0])
    except (BudgetExhaustedError, ConditioningError, DegenerateIndicatorError) as err:
        fail(0, err)
    status = "converged" if rr.converged else "max_iters"
    report.levels.append(_make_record(problem, sd, c, ts[0], rr.iterations, status,
                                      time.perf_counter() - tic))

    for n in range(1, cfg.m_levels + 1):
        tic = time.perf_counter()
        try:
            step = integrate(sd, problem, c, float(ts[n - 1]), float(ts[n]), cfg.integ)
            u_hat = nodal_values(sd, step.c_end)
            carrier = KernelInterpolator(eps0=cfg.eps0).fit(ps.points, u_hat)
        except (StiffFailureError, BlowUpError, ConditioningError) as err:
            fail(n, err)
        provider = lambda q, s=carrier: s.predict(q.points)
        start = base if cfg.restart_from_base else ps
        try:
            rr = refine_loop(start, provider, cfg.eps0, cfg.refine)
            ps = rr.point_set
            sd = assemble(problem, ps, cfg.eps0)
            c = consistent_initialize(sd, problem, rr.interpolant.alpha_, float(ts[n]))
        except BudgetExhaustedError as err:
            # record the integrated (pre-refinement) state so the failure is
            # diagnosable, then abort
            report.levels.append(_make_record(
                problem, sd, step.c_end, ts[n], err.iteration or 0, "budget",
                time.perf_counter() - tic))
            fail(n, err)
        except (ConditioningError, DegenerateIndicatorError) as err:
            fail(n, err)
        status = "converged" if rr.converged else "max_iters"
        report.levels.append(_make_record(problem, sd, c, ts[n], rr.iterations, status,
                                          time.perf_counter() - tic))

    report.status = "completed"
    return report
