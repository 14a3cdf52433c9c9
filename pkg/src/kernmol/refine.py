"""Point-set geometry and the per-time-level refinement iteration.

Refinement rule: wherever the leave-one-out indicator exceeds the threshold
``tau`` at a point ``x_k``, the two candidates ``x_k - q`` and ``x_k + q`` are
inserted, where ``q`` is the separation distance (half the minimum gap) of the
*current* set.  Candidates outside the open interval ``(a, b)`` are dropped,
as are candidates closer than ``min_separation`` to any existing point or to a
candidate accepted earlier in the same sweep (flagged points are processed in
ascending order).  Boundary points never move.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import BudgetExhaustedError
from .interp import KernelInterpolator


@dataclass(frozen=True)
class PointSet:
    """Strictly increasing collocation points spanning ``[a, b]``.

    The endpoints are always present: ``points[0] == a``, ``points[-1] == b``.
    """

    points: np.ndarray
    a: float
    b: float

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        object.__setattr__(self, "points", pts)
        if pts.ndim != 1 or pts.size < 2:
            raise ValueError("a PointSet needs at least the two boundary points")
        if not np.isfinite(pts).all():
            raise ValueError("points contain non-finite values")
        if np.any(np.diff(pts) <= 0):
            raise ValueError("points must be strictly increasing")
        if pts[0] != self.a or pts[-1] != self.b:
            raise ValueError(
                f"point set must span [{self.a}, {self.b}], got [{pts[0]}, {pts[-1]}]"
            )

    @classmethod
    def uniform(cls, a: float, b: float, n: int) -> "PointSet":
        if n < 2:
            raise ValueError("need at least 2 points")
        return cls(points=np.linspace(a, b, n), a=a, b=b)

    @property
    def n(self) -> int:
        return self.points.size

    @property
    def interior(self) -> np.ndarray:
        return self.points[1:-1]

    def with_points(self, pts: np.ndarray) -> "PointSet":
        return PointSet(points=pts, a=self.a, b=self.b)


@dataclass(frozen=True)
class RefineConfig:
    """Refinement threshold and safety rails.

    ``min_separation=None`` resolves to ``1e-10 * (b - a)`` of the point set
    being refined.
    """

    tau: float
    max_iters: int = 20
    min_separation: float | None = None
    max_points: int = 1000

    def __post_init__(self):
        if not (self.tau > 0):
            raise ValueError(f"tau must be positive, got {self.tau}")
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")
        if self.min_separation is not None and not (self.min_separation > 0):
            raise ValueError("min_separation must be positive")
        if self.max_points < 2:
            raise ValueError("max_points must allow at least the boundary points")

    def resolve_min_separation(self, ps: PointSet) -> float:
        if self.min_separation is not None:
            return self.min_separation
        return 1e-10 * (ps.b - ps.a)


@dataclass
class RefineResult:
    point_set: PointSet
    interpolant: KernelInterpolator
    iterations: int
    converged: bool
    max_indicator: float
    inserted_total: int = field(default=0)


def separation_distance(ps: PointSet) -> float:
    """Half the minimum pairwise distance (adjacent gap, for sorted points)."""
    if ps.n < 2:
        raise ValueError("separation distance needs at least 2 points")
    return 0.5 * float(np.min(np.diff(ps.points)))


def refine_once(ps: PointSet, e, cfg: RefineConfig) -> tuple[PointSet, int]:
    """One insertion sweep: two candidates around every point with ``e_k > tau``.

    Raises ``BudgetExhaustedError`` if accepting the candidates would push the
    set past ``cfg.max_points``.
    """
    e = np.asarray(e, dtype=float)
    if e.size != ps.n:
        raise ValueError(f"indicator length {e.size} != point count {ps.n}")
    q = separation_distance(ps)
    minsep = cfg.resolve_min_separation(ps)
    pts = ps.points
    flagged = np.flatnonzero(e > cfg.tau)

    accepted: list[float] = []
    for k in flagged:
        for cand in (pts[k] - q, pts[k] + q):
            if not (ps.a < cand < ps.b):
                continue
            if np.min(np.abs(pts - cand)) < minsep:
                continue
            if accepted and min(abs(cand - c) for c in accepted) < minsep:
                continue
            accepted.append(cand)

    if ps.n + len(accepted) > cfg.max_points:
        raise BudgetExhaustedError(ps.n, ps.n + len(accepted), cfg.max_points,
                                   flagged_points=pts[flagged])
    if not accepted:
        return ps, 0
    merged = np.sort(np.concatenate([pts, np.asarray(accepted)]))
    return ps.with_points(merged), len(accepted)


def refine_loop(
    ps: PointSet,
    values_provider: Callable[[PointSet], np.ndarray],
    eps0: float,
    cfg: RefineConfig,
) -> RefineResult:
    """Iterate fit -> leave-one-out indicator -> insertion until the indicator
    is everywhere <= tau (or a safety rail stops the loop).

    The returned interpolant is always fitted on the returned point set, and
    ``max_indicator`` is its indicator maximum.  ``converged=False`` means the
    iteration cap was hit, or an insertion sweep could not place any point.
    Budget exhaustion propagates as ``BudgetExhaustedError`` with the loop
    iteration attached.
    """
    if ps.n > cfg.max_points:
        raise ValueError(
            f"starting set has {ps.n} points, over the {cfg.max_points}-point budget"
        )
    current = ps
    inserted_total = 0
    for i in range(1, cfg.max_iters + 1):
        values = np.asarray(values_provider(current), dtype=float)
        if values.size != current.n:
            raise ValueError(
                f"values provider returned {values.size} values for {current.n} points"
            )
        fit = KernelInterpolator(eps0=eps0).fit(current.points, values)
        e = fit.loocv_errors()
        max_e = float(np.max(e))
        if max_e <= cfg.tau:
            return RefineResult(current, fit, i, True, max_e, inserted_total)
        if i == cfg.max_iters:
            return RefineResult(current, fit, i, False, max_e, inserted_total)
        try:
            nxt, inserted = refine_once(current, e, cfg)
        except BudgetExhaustedError as err:
            err.iteration = i
            raise
        if inserted == 0:
            # every candidate was clipped or deduped; no further progress possible
            return RefineResult(current, fit, i, False, max_e, inserted_total)
        inserted_total += inserted
        current = nxt
    raise AssertionError("unreachable")
