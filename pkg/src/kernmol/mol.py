"""Method-of-lines semi-discretization.

The solution ansatz is a kernel expansion ``u(x, t) = sum_j c_j(t) k_j(x)``.
Collocating the PDE at interior points and the boundary conditions at the two
endpoints turns a problem

    u_t = L u + f     on (a, b),
    u   = g           on {a, b}   (Dirichlet),
    u   = u0          at t = t0,

into the index-1 DAE ``M c' = F(t, c)`` where ``M`` equals the kernel
collocation matrix with its two boundary rows zeroed, the interior rows of
``F`` evaluate ``L u + f`` from the nodal values ``u = K c``, ``u_x = K_x c``,
``u_xx = K_xx c``, and the boundary rows of ``F`` are the algebraic defects
``u(a) - g_a(t)`` and ``u(b) - g_b(t)``.

Nonlinear operators are applied nodally: the user-supplied ``pde_rhs`` gets
the nodal value/derivative arrays, so ``u * u_x`` and friends are ordinary
elementwise expressions.  ``pde_rhs`` must broadcast elementwise (the
finite-difference Jacobian feeds it matrices whose columns are perturbed
states; ``x`` then arrives as a column vector).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from . import densela
from .errors import BlowUpError, ConditioningError, SingularMatrixError
from .interp import RCOND_FLOOR
from .kernel import build_matrix, variable_shape
from .refine import PointSet

BC_CONSISTENCY_TOL = 1e-10


@dataclass(frozen=True)
class DirichletBC:
    """Dirichlet boundary record: ``target(x, t)`` is the prescribed value.

    Internally the solver enforces ``u(x, t) - target(x, t) = 0``.  Other
    boundary operators would be new record types consumed by ``assemble``.
    """

    target: Callable[[float, float], float]


@dataclass(frozen=True)
class ProblemDef:
    """A 1D time-dependent boundary value problem.

    ``pde_rhs(u, ux, uxx, x, t)`` assembles ``L u + f`` at the interior
    points from nodal arrays; it must be an elementwise numpy expression.
    ``exact`` is optional: ``exact(x, t)`` when an analytic solution exists.
    """

    name: str
    a: float
    b: float
    t0: float
    t_final: float
    nu: float
    pde_rhs: Callable
    bc_left: DirichletBC
    bc_right: DirichletBC
    u0: Callable
    exact: Optional[Callable] = None

    def __post_init__(self):
        if not self.a < self.b:
            raise ValueError(f"need a < b, got [{self.a}, {self.b}]")
        if not self.t0 < self.t_final:
            raise ValueError(f"need t0 < t_final, got [{self.t0}, {self.t_final}]")
        if not (self.nu > 0):
            raise ValueError(f"nu must be positive, got {self.nu}")
        for x, bc, side in ((self.a, self.bc_left, "left"),
                            (self.b, self.bc_right, "right")):
            gap = abs(float(self.u0(x)) - float(bc.target(x, self.t0)))
            if gap > BC_CONSISTENCY_TOL:
                raise ValueError(
                    f"initial data inconsistent with {side} boundary value at t0 "
                    f"(|u0 - target| = {gap:.3e})"
                )


@dataclass(frozen=True)
class SemiDiscrete:
    """Assembled collocation system over a fixed point set."""

    point_set: PointSet
    shapes: np.ndarray
    k_id: np.ndarray
    k_dx: np.ndarray
    k_dxx: np.ndarray
    mass: np.ndarray
    k_id_factors: densela.LuFactors

    @property
    def n(self) -> int:
        return self.point_set.n


def assemble(problem: ProblemDef, point_set: PointSet, eps0: float) -> SemiDiscrete:
    """Build shapes, the three kernel matrices, the (singular) mass matrix,
    and the LU factors of the identity-part matrix."""
    if point_set.n < 3:
        raise ValueError("semi-discretization needs at least 3 points")
    if point_set.a != problem.a or point_set.b != problem.b:
        raise ValueError(
            f"point set spans [{point_set.a}, {point_set.b}] but the problem "
            f"domain is [{problem.a}, {problem.b}]"
        )
    pts = point_set.points
    shapes = variable_shape(pts, eps0)
    k_id = build_matrix(pts, shapes, deriv=0)
    k_dx = build_matrix(pts, shapes, deriv=1)
    k_dxx = build_matrix(pts, shapes, deriv=2)
    mass = k_id.copy()
    mass[0, :] = 0.0
    mass[-1, :] = 0.0
    try:
        factors = densela.lu_factor(k_id)
    except SingularMatrixError as err:
        raise ConditioningError(np.inf, context="collocation matrix") from err
    rcond = densela.rcond_estimate(factors)
    if rcond < RCOND_FLOOR:
        raise ConditioningError(1.0 / max(rcond, np.finfo(float).tiny),
                                context="collocation matrix")
    return SemiDiscrete(point_set=point_set, shapes=shapes, k_id=k_id, k_dx=k_dx,
                        k_dxx=k_dxx, mass=mass, k_id_factors=factors)


def initial_coefficients(sd: SemiDiscrete, problem: ProblemDef) -> np.ndarray:
    """Coefficients interpolating the initial profile at every point."""
    return densela.lu_solve(sd.k_id_factors, problem.u0(sd.point_set.points))


def nodal_values(sd: SemiDiscrete, c: np.ndarray) -> np.ndarray:
    """Nodal solution values ``K c`` (columnwise for a matrix of states)."""
    return sd.k_id @ c


def dae_rhs_from_nodal(sd: SemiDiscrete, problem: ProblemDef, t: float,
                       u: np.ndarray, ux: np.ndarray, uxx: np.ndarray) -> np.ndarray:
    """Right-hand side F from nodal arrays.

    Accepts a single state (1d arrays of length N) or a batch (N x m arrays,
    one state per column).  Raises ``BlowUpError`` on non-finite values.
    """
    if not (np.isfinite(u).all() and np.isfinite(ux).all() and np.isfinite(uxx).all()):
        raise BlowUpError(t)
    pts = sd.point_set.points
    x_int = pts[1:-1]
    if u.ndim == 2:
        x_int = x_int[:, None]
    f = np.empty_like(u)
    f[1:-1] = problem.pde_rhs(u[1:-1], ux[1:-1], uxx[1:-1], x_int, t)
    f[0] = u[0] - problem.bc_left.target(pts[0], t)
    f[-1] = u[-1] - problem.bc_right.target(pts[-1], t)
    return f


def dae_rhs(sd: SemiDiscrete, problem: ProblemDef, t: float, c: np.ndarray) -> np.ndarray:
    """Right-hand side F(t, c) of the semi-discrete DAE ``M c' = F``."""
    with np.errstate(all="ignore"):  # non-finite values raise BlowUpError below
        return dae_rhs_from_nodal(sd, problem, t, sd.k_id @ c, sd.k_dx @ c, sd.k_dxx @ c)


def dae_residual(sd: SemiDiscrete, problem: ProblemDef, t: float,
                 c: np.ndarray, cdot: np.ndarray) -> np.ndarray:
    """Implicit residual ``M cdot - F(t, c)``; zero along solutions.

    Boundary rows reduce to ``-(u_boundary - target)`` since the mass matrix
    rows there vanish.
    """
    c = np.asarray(c, dtype=float)
    cdot = np.asarray(cdot, dtype=float)
    if c.shape[0] != sd.n or cdot.shape[0] != sd.n:
        raise ValueError(f"state length mismatch: n={sd.n}, |c|={c.shape[0]}, "
                         f"|cdot|={cdot.shape[0]}")
    return sd.mass @ cdot - dae_rhs(sd, problem, t, c)
