"""Implicit BDF1/BDF2 integrator for the index-1 DAE ``M c' = F(t, c)``.

The mass matrix is constant and singular (zero boundary rows), so both
formulas solve an implicit system at every step:

    BDF1:  M (y - c_n) / h                          = F(t_n + h, y)
    BDF2:  M (a0 y + a1 c_n + a2 c_{n-1}) / h       = F(t_n + h, y)

with variable-step coefficients ``a0 = (1+2r)/(1+r)``, ``a1 = -(1+r)``,
``a2 = r^2/(1+r)`` for step ratio ``r = h/h_prev``.  The nonlinear system is
solved by Newton with an LU-factorized iteration matrix ``(a0/h) M - dF/dc``;
``dF/dc`` comes from forward finite differences on F and is reused across
steps until Newton converges slowly or the step size moves by more than 2x.

Local error control: BDF1 estimates by step doubling (one full step vs. two
half steps, advancing with the half-step result); BDF2 estimates by the
difference to a companion BDF1 solution of the same step.  A step is accepted
when the estimate is below ``rel_tol * |c| + abs_tol`` (max norm).  When
``min_step == max_step`` the step size is pinned and error estimation is
skipped entirely (fixed-step mode, used for convergence studies).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from . import densela
from .errors import BlowUpError, SingularMatrixError, StiffFailureError
from .mol import ProblemDef, SemiDiscrete, dae_rhs, dae_rhs_from_nodal

_SQRT_EPS = math.sqrt(np.finfo(float).eps)
_MIN_FACTOR = 0.2
_MAX_FACTOR = 5.0
_SAFETY = 0.9
# Newton iteration count beyond which the cached Jacobian is considered stale
_SLOW_NEWTON = 4


@dataclass(frozen=True)
class IntegratorConfig:
    method: str = "bdf2"
    rel_tol: float = 1e-4
    abs_tol: float = 1e-7
    newton_tol: float = 1e-9
    newton_max_iters: int = 12
    initial_step: float = 1e-2
    min_step: float = 1e-12
    max_step: float = math.inf

    def __post_init__(self):
        if self.method not in ("bdf1", "bdf2"):
            raise ValueError(f"method must be 'bdf1' or 'bdf2', got {self.method!r}")
        if not (self.rel_tol > 0 and self.abs_tol > 0 and self.newton_tol > 0):
            raise ValueError("tolerances must be positive")
        if self.newton_max_iters < 1:
            raise ValueError("newton_max_iters must be >= 1")
        if not (0 < self.min_step <= self.initial_step <= self.max_step):
            raise ValueError(
                "need 0 < min_step <= initial_step <= max_step, got "
                f"{self.min_step}, {self.initial_step}, {self.max_step}"
            )


@dataclass
class StepResult:
    c_end: np.ndarray
    steps_taken: int
    newton_iters_total: int
    last_step: float


class _NewtonOutcome:
    __slots__ = ("y", "iters", "converged", "res_norm", "blew_up")

    def __init__(self, y, iters, converged, res_norm, blew_up=False):
        self.y = y
        self.iters = iters
        self.converged = converged
        self.res_norm = res_norm
        self.blew_up = blew_up


def _generic_fd_jacobian(fun: Callable, t: float, c: np.ndarray, f0: np.ndarray) -> np.ndarray:
    delta = _SQRT_EPS * (1.0 + np.abs(c))
    jac = np.empty((f0.size, c.size))
    with np.errstate(all="ignore"):  # overflow surfaces as non-finite entries
        for j in range(c.size):
            cp = c.copy()
            cp[j] += delta[j]
            jac[:, j] = (fun(t, cp) - f0) / delta[j]
    return jac


def _newton(res_fun, lu, y0: np.ndarray, cfg: IntegratorConfig) -> _NewtonOutcome:
    y = y0.copy()
    res_norm = np.inf
    for it in range(1, cfg.newton_max_iters + 1):
        try:
            r = res_fun(y)
        except BlowUpError:
            return _NewtonOutcome(y, it, False, np.inf, blew_up=True)
        if not np.isfinite(r).all():
            return _NewtonOutcome(y, it, False, np.inf, blew_up=True)
        res_norm = float(np.max(np.abs(r)))
        delta = densela.lu_solve(lu, -r)
        y = y + delta
        if float(np.max(np.abs(delta))) <= cfg.newton_tol * (1.0 + float(np.max(np.abs(y)))):
            return _NewtonOutcome(y, it, True, res_norm)
    return _NewtonOutcome(y, cfg.newton_max_iters, False, res_norm)


def integrate_implicit(
    mass: np.ndarray,
    fun: Callable[[float, np.ndarray], np.ndarray],
    c_start: np.ndarray,
    t_start: float,
    t_end: float,
    cfg: IntegratorConfig,
    jac: Optional[Callable[[float, np.ndarray, np.ndarray], np.ndarray]] = None,
) -> StepResult:
    """Advance ``M c' = F(t, c)`` from ``t_start`` to exactly ``t_end``.

    ``jac(t, c, f0)`` returns ``dF/dc``; by default it is computed by dense
    forward differences on ``fun``.  Raises ``StiffFailureError`` when Newton
    cannot converge at the minimum step and ``BlowUpError`` when the state
    leaves the representable range.
    """
    if not t_start < t_end:
        raise ValueError(f"need t_start < t_end, got [{t_start}, {t_end}]")
    mass = np.asarray(mass, dtype=float)
    c = np.asarray(c_start, dtype=float).copy()
    if jac is None:
        jac = lambda t, y, f0: _generic_fd_jacobian(fun, t, y, f0)

    fixed_step = cfg.min_step == cfg.max_step
    span = t_end - t_start
    t = t_start
    h = min(cfg.initial_step, span)
    h = max(h, cfg.min_step) if not fixed_step else cfg.initial_step

    c_prev: Optional[np.ndarray] = None  # state before c (BDF2 history)
    h_prev = 0.0

    fjac: Optional[np.ndarray] = None
    fjac_h = 0.0
    steps = 0
    newton_total = 0
    t_edge = 4.0 * np.finfo(float).eps * max(abs(t_start), abs(t_end), 1.0)

    def make_step_lu(a0_over_h: float):
        try:
            return densela.lu_factor(a0_over_h * mass - fjac)
        except SingularMatrixError:
            return None

    def solve_bdf1(h_step: float, t_from: float, c_from: np.ndarray, y_guess: np.ndarray,
                   lu_reuse=None):
        lu = lu_reuse if lu_reuse is not None else make_step_lu(1.0 / h_step)
        if lu is None:
            return _NewtonOutcome(c_from, 0, False, np.inf)
        res = lambda y: mass @ (y - c_from) / h_step - fun(t_from + h_step, y)
        out = _newton(res, lu, y_guess, cfg)
        if lu_reuse is not None and not out.converged:
            # the borrowed iteration matrix was not contractive enough; pay
            # for the exact one
            lu = make_step_lu(1.0 / h_step)
            if lu is None:
                return out
            out2 = _newton(res, lu, y_guess, cfg)
            out2.iters += out.iters
            return out2
        return out

    def solve_bdf2(h_step: float, rho: float, t_new: float,
                   c_n: np.ndarray, c_nm1: np.ndarray):
        a0 = (1.0 + 2.0 * rho) / (1.0 + rho)
        a1 = -(1.0 + rho)
        a2 = rho * rho / (1.0 + rho)
        lu = make_step_lu(a0 / h_step)
        if lu is None:
            return _NewtonOutcome(c_n, 0, False, np.inf), None
        hist = mass @ (a1 * c_n + a2 * c_nm1) / h_step
        res = lambda y: (a0 / h_step) * (mass @ y) + hist - fun(t_new, y)
        y_pred = c_n + rho * (c_n - c_nm1)
        return _newton(res, lu, y_pred, cfg), lu

    while t_end - t > t_edge:
        remaining = t_end - t
        landing = h >= remaining
        h_try = remaining if landing else h

        # refresh the cached dF/dc if missing or the step moved too far from
        # the size it was built for
        if fjac is None or not (0.5 <= h_try / fjac_h <= 2.0):
            f0 = fun(t, c)
            if not np.isfinite(f0).all():
                raise BlowUpError(t)
            fjac = jac(t, c, f0)
            if not np.isfinite(fjac).all():
                raise BlowUpError(t)
            fjac_h = h_try
        jac_fresh_this_attempt = False

        use_bdf2 = cfg.method == "bdf2" and c_prev is not None and h_prev > 0.0

        while True:  # Newton attempt loop (retries with fresh Jacobian)
            step_lu = None
            if use_bdf2:
                out, step_lu = solve_bdf2(h_try, h_try / h_prev, t + h_try, c, c_prev)
            else:
                out = solve_bdf1(h_try, t, c, c.copy())
            newton_total += out.iters
            if out.converged or jac_fresh_this_attempt:
                break
            f0 = fun(t, c)
            if not np.isfinite(f0).all():
                raise BlowUpError(t)
            fjac = jac(t, c, f0)
            if not np.isfinite(fjac).all():
                raise BlowUpError(t)
            fjac_h = h_try
            jac_fresh_this_attempt = True

        if not out.converged:
            if h_try <= cfg.min_step * (1.0 + 1e-12):
                if out.blew_up:
                    raise BlowUpError(t + h_try)
                raise StiffFailureError(t, h_try, out.res_norm)
            h = max(h_try / 2.0, cfg.min_step)
            fjac = None  # force rebuild at the new step size
            continue

        slow = out.iters > _SLOW_NEWTON

        if fixed_step:
            advance = out.y
            est = 0.0
            accept = True
            half_state = None
        elif use_bdf2:
            companion = solve_bdf1(h_try, t, c, out.y.copy(), lu_reuse=step_lu)
            newton_total += companion.iters
            if not companion.converged:
                est = np.inf
            else:
                est = float(np.max(np.abs(out.y - companion.y)))
            advance = out.y
            half_state = None
        else:
            # BDF1 step doubling: two half steps, advance with their result
            mid = solve_bdf1(h_try / 2.0, t, c, out.y.copy())
            newton_total += mid.iters
            half = (
                solve_bdf1(h_try / 2.0, t + h_try / 2.0, mid.y, mid.y.copy())
                if mid.converged else mid
            )
            if mid.converged:
                newton_total += half.iters
            if not (mid.converged and half.converged):
                est = np.inf
                advance = out.y
                half_state = None
            else:
                est = float(np.max(np.abs(half.y - out.y)))
                advance = half.y
                half_state = mid.y

        if not fixed_step:
            tol = cfg.rel_tol * float(np.max(np.abs(advance))) + cfg.abs_tol
            accept = est <= tol or h_try <= cfg.min_step * (1.0 + 1e-12)
            if np.isfinite(est):
                factor = _SAFETY * math.sqrt(tol / max(est, np.finfo(float).tiny))
                factor = min(max(factor, _MIN_FACTOR), _MAX_FACTOR)
            else:
                factor = _MIN_FACTOR

        if not accept:
            h = max(h_try * factor, cfg.min_step)
            continue

        if not np.isfinite(advance).all():
            raise BlowUpError(t + h_try)

        if half_state is not None:
            # the advance really consists of two BDF1 half steps
            c_prev = half_state
            h_prev = h_try / 2.0
        else:
            c_prev = c
            h_prev = h_try
        c = advance
        t = t_end if landing else t + h_try
        steps += 1
        last_step = h_try
        if not fixed_step:
            h = min(max(h_try * factor, cfg.min_step), cfg.max_step)
            if slow:
                fjac = None

    if steps == 0:
        raise ValueError("integration window is empty (t_end too close to t_start)")
    return StepResult(c_end=c, steps_taken=steps,
                      newton_iters_total=newton_total, last_step=last_step)


def _mol_fd_jacobian(sd: SemiDiscrete, problem: ProblemDef, t: float,
                     c: np.ndarray, f0: np.ndarray) -> np.ndarray:
    """Forward-difference dF/dc for the collocation DAE.

    The nodal maps are linear, so the perturbed nodal values for all N
    one-sided differences are formed at once from the kernel-matrix columns;
    only the pde_rhs application is differenced.
    """
    delta = _SQRT_EPS * (1.0 + np.abs(c))
    u0 = sd.k_id @ c
    ux0 = sd.k_dx @ c
    uxx0 = sd.k_dxx @ c
    u = u0[:, None] + sd.k_id * delta[None, :]
    ux = ux0[:, None] + sd.k_dx * delta[None, :]
    uxx = uxx0[:, None] + sd.k_dxx * delta[None, :]
    f_all = dae_rhs_from_nodal(sd, problem, t, u, ux, uxx)
    return (f_all - f0[:, None]) / delta[None, :]


def integrate(sd: SemiDiscrete, problem: ProblemDef, c_start: np.ndarray,
              t_start: float, t_end: float, cfg: IntegratorConfig) -> StepResult:
    """Advance the assembled collocation DAE across one time window.

    ``c_start`` must satisfy the boundary constraints at ``t_start`` to 1e-8
    (see ``consistent_initialize``).
    """
    c_start = np.asarray(c_start, dtype=float)
    if c_start.shape != (sd.n,):
        raise ValueError(f"c_start has shape {c_start.shape}, expected ({sd.n},)")
    f0 = dae_rhs(sd, problem, t_start, c_start)
    bc_defect = max(abs(float(f0[0])), abs(float(f0[-1])))
    if bc_defect > 1e-8:
        raise ValueError(
            f"c_start violates the boundary constraints at t={t_start:.6g} "
            f"(defect {bc_defect:.3e}); run consistent_initialize first"
        )
    fun = lambda t, y: dae_rhs(sd, problem, t, y)
    jac = lambda t, y, f: _mol_fd_jacobian(sd, problem, t, y, f)
    return integrate_implicit(sd.mass, fun, c_start, t_start, t_end, cfg, jac=jac)


def consistent_initialize(sd: SemiDiscrete, problem: ProblemDef,
                          c_guess: np.ndarray, t: float) -> np.ndarray:
    """Project a coefficient guess onto the boundary constraints.

    Interior nodal values are kept (their collocation equations are reused
    unchanged); the two boundary collocation equations are replaced by the
    Dirichlet targets at time ``t``.  One linear solve.
    """
    c_guess = np.asarray(c_guess, dtype=float)
    if c_guess.shape != (sd.n,):
        raise ValueError(f"c_guess has shape {c_guess.shape}, expected ({sd.n},)")
    v = sd.k_id @ c_guess
    pts = sd.point_set.points
    v[0] = problem.bc_left.target(pts[0], t)
    v[-1] = problem.bc_right.target(pts[-1], t)
    return densela.lu_solve(sd.k_id_factors, v)
