"""Benchmark problem definitions.

Three nonlinear test problems: a Burgers equation with a known shock-type
solution, a Burgers moving-front problem (no closed form), and a bistable
Allen-Cahn equation.  Each factory returns a ``ProblemDef`` wired for the
collocation solver; ``nu`` and the final time can be overridden.
"""

from __future__ import annotations

import numpy as np
from scipy.special import expit

from .mol import DirichletBC, ProblemDef


def burgers_shock_exact(x, t, nu: float):
    """Shock-type solution of the viscous Burgers equation.

    u(x,t) = (x/t) / (1 + sqrt(t/c) * exp(x^2/(4 nu t))),  c = exp(1/(8 nu)).

    The denominator term is exp(theta) with
    theta = x^2/(4 nu t) - 1/(16 nu) + ln(t)/2; it is evaluated through the
    logistic function in log space because exp(1/(8 nu)) overflows for small
    nu (it is e^125 already at nu = 1e-3).
    """
    x = np.asarray(x, dtype=float)
    theta = x * x / (4.0 * nu * t) - 1.0 / (16.0 * nu) + 0.5 * np.log(t)
    return (x / t) * expit(-theta)


def burgers_shock(nu: float = 1e-3, t0: float = 1.0, t_final: float = 3.0) -> ProblemDef:
    """Burgers equation u_t = nu u_xx - u u_x on [0, 1], shock-type exact
    solution, homogeneous Dirichlet boundaries, t in [t0, t_final]."""

    def rhs(u, ux, uxx, x, t):
        return nu * uxx - u * ux

    exact = lambda x, t: burgers_shock_exact(x, t, nu)
    zero = DirichletBC(lambda x, t: 0.0)
    return ProblemDef(
        name="burgers-shock", a=0.0, b=1.0, t0=t0, t_final=t_final, nu=nu,
        pde_rhs=rhs, bc_left=zero, bc_right=zero,
        u0=lambda x: exact(x, t0), exact=exact,
    )


def burgers_moving_front(nu: float = 1e-3, t_final: float = 1.0) -> ProblemDef:
    """Burgers equation on [0, 1] from u(x,0) = sin(2 pi x) + sin(pi x)/2;
    the wave steepens into a front that travels toward x = 1.  No closed-form
    solution."""

    def rhs(u, ux, uxx, x, t):
        return nu * uxx - u * ux

    def u0(x):
        x = np.asarray(x, dtype=float)
        return np.sin(2.0 * np.pi * x) + 0.5 * np.sin(np.pi * x)

    zero = DirichletBC(lambda x, t: 0.0)
    return ProblemDef(
        name="burgers-front", a=0.0, b=1.0, t0=0.0, t_final=t_final, nu=nu,
        pde_rhs=rhs, bc_left=zero, bc_right=zero, u0=u0, exact=None,
    )


def allen_cahn(nu: float = 1e-6, t_final: float = 8.25,
               unstable_reaction_sign: bool = False) -> ProblemDef:
    """Allen-Cahn equation u_t = nu u_xx + u (1 - u^2) on [-1, 1] with
    boundary values -1 and +1.

    The bistable reaction u (1 - u^2) keeps solutions in [-1, 1] with stable
    phases at +-1.  ``unstable_reaction_sign=True`` switches the reaction to
    u (1 + u^2), which has no stable phases and blows up in finite time; it is
    kept selectable so the difference is observable.
    """

    if unstable_reaction_sign:
        def rhs(u, ux, uxx, x, t):
            return nu * uxx + u * (1.0 + u * u)
    else:
        def rhs(u, ux, uxx, x, t):
            return nu * uxx + u * (1.0 - u * u)

    def u0(x):
        x = np.asarray(x, dtype=float)
        return 0.6 * x + 0.4 * np.sin(0.5 * np.pi * (x * x - 3.0 * x - 1.0))

    return ProblemDef(
        name="allen-cahn", a=-1.0, b=1.0, t0=0.0, t_final=t_final, nu=nu,
        pde_rhs=rhs,
        bc_left=DirichletBC(lambda x, t: -1.0),
        bc_right=DirichletBC(lambda x, t: 1.0),
        u0=u0, exact=None,
    )


BENCHMARKS = {
    "burgers-shock": burgers_shock,
    "burgers-front": burgers_moving_front,
    "allen-cahn": allen_cahn,
}
