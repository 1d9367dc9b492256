"""Centralized ground-truth solver over the intersection of all sets.

Desk-scale by design: a long diminishing-step projected subgradient
phase locates the basin, restarted fixed-step phases with halving
stepsizes polish it, and the best value ever seen is what counts. The
feasible-set projection is cyclic projection onto each member set in
turn, which is exact enough at tol 1e-12 and needs no solver.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from ._kernels import get_backend
from ._kernels.numpy_backend import ORACLE_NO_PROJECTION
from ._kernels.pack import pack_agents
from .errors import DomainError, InfeasibleProblemError, NumericalFailureError
from .objectives import lipschitz_bound
from .sets import Ball, Box

DEFAULT_TOL = 1e-8
PROJECT_TOL = 1e-12
PROJECT_MAX_CYCLES = 100_000

N_DIMINISH = 50_000
POLISH_ITERS = 3_000
POLISH_PHASES = 60
GAP_WINDOW = 1_000


@dataclass
class OracleSolution:
    x_star: np.ndarray
    f_star: float
    method: str
    achieved_tolerance: float
    iterations: int = 0

    def to_dict(self):
        return {
            "x_star": [float(v) for v in self.x_star],
            "f_star": float(self.f_star),
            "method": self.method,
            "achieved_tolerance": float(self.achieved_tolerance),
            "iterations": int(self.iterations),
        }

    @classmethod
    def from_dict(cls, d):
        return cls(
            x_star=np.asarray(d["x_star"], dtype=float),
            f_star=float(d["f_star"]),
            method=str(d["method"]),
            achieved_tolerance=float(d["achieved_tolerance"]),
            iterations=int(d.get("iterations", 0)),
        )


def intersection_project(sets, x, tol=PROJECT_TOL, max_cycles=PROJECT_MAX_CYCLES):
    """Point in the intersection of all sets near x, by cyclic projection.

    Iterates full cycles over the sets until a cycle moves the point by
    less than tol in every coordinate. A movement that stops shrinking
    while staying above tol is the signature of disjoint sets (the point
    translates back and forth), reported as infeasibility, as is running
    out of cycles.
    """
    x = np.asarray(x, dtype=float).copy()
    prev_moved = np.inf
    stable = 0
    for _ in range(max_cycles):
        moved = 0.0
        for s in sets:
            xn = s.project(x)
            moved = max(moved, float(np.max(np.abs(xn - x))))
            x = xn
        if moved < tol:
            return x
        if abs(moved - prev_moved) <= 1e-15 * max(1.0, moved):
            stable += 1
            if stable >= 10:
                raise InfeasibleProblemError(
                    "cyclic projection stalled above tolerance; sets appear disjoint"
                )
        else:
            stable = 0
        prev_moved = moved
    raise InfeasibleProblemError(
        f"cyclic projection did not converge in {max_cycles} cycles"
    )


def _set_center(s):
    if isinstance(s, Box):
        return 0.5 * (s.lower + s.upper)
    if isinstance(s, Ball):
        return s.center.copy()
    raise TypeError(f"unsupported set type {type(s).__name__}")


def find_interior_point(sets, tol=PROJECT_TOL):
    """A point strictly inside every set, or InfeasibleProblemError.

    Tries the average of the set centers, then cyclic projections of
    that average and of the origin. Strict interiority is what the
    equivalence theory assumes, so a merely-boundary point is rejected.
    """
    m = sets[0].dim
    centers = np.stack([_set_center(s) for s in sets])
    candidates = [centers.mean(axis=0), np.zeros(m)]
    best = None
    for cand in candidates:
        for point in (cand, intersection_project(sets, cand, tol)):
            margin = min(s.interior_margin(point) for s in sets)
            if margin > 0.0:
                return point
            if best is None:
                best = (point, margin)
    raise InfeasibleProblemError(
        "no common interior point found (closest margin "
        f"{best[1]:.3e}); the set intersection has empty interior"
    )


def solve_centralized(objectives, sets, tol=DEFAULT_TOL, x_init=None,
                      backend=None):
    """Minimize F(x) = sum_i f_i(x) over the intersection of all sets.

    Projected subgradient descent: diminishing steps a0/sqrt(k) first,
    then restarted fixed-step polish phases with halving stepsize,
    stopping once the best value has improved by less than tol over the
    trailing window at a step scale fine enough to resolve tol. The
    returned point is re-projected so it is within 1e-10 of every set.
    """
    objectives = tuple(objectives)
    sets = tuple(sets)
    if len(objectives) != len(sets) or not objectives:
        raise DomainError("need one set per objective, at least one pair")
    dims = {o.dim for o in objectives} | {s.dim for s in sets}
    if len(dims) != 1:
        raise DomainError(f"inconsistent dimensions: {sorted(dims)}")
    m = dims.pop()

    interior = find_interior_point(sets)
    if x_init is None:
        x_init = interior
    x_init = np.asarray(x_init, dtype=float)

    P, q, r, anchor, kind, lo, hi, cen, rad = pack_agents(objectives, sets, m)
    grad_scale = float(sum(lipschitz_bound(f, s) for f, s in zip(objectives, sets)))
    scale = max(1.0, max(s.max_norm() for s in sets))
    a0 = scale / max(grad_scale, 1e-12)
    lam_max = float(np.linalg.eigvalsh(P.sum(axis=0))[-1])
    alpha0 = min(1.0 / (1.0 + lam_max), scale / (1.0 + grad_scale))

    mod, backend_name = get_backend(backend)
    x_best, f_best, achieved, iters, status = mod.oracle_descent(
        x_init, P, q, r, anchor, kind, lo, hi, cen, rad,
        a0, N_DIMINISH, alpha0, POLISH_ITERS, POLISH_PHASES,
        float(tol), GAP_WINDOW, 1e-9, PROJECT_TOL, 10_000, grad_scale,
    )
    if status == ORACLE_NO_PROJECTION:
        raise InfeasibleProblemError("projection failed during the solve")
    if not np.isfinite(f_best):
        raise NumericalFailureError("oracle descent produced a non-finite value")

    x_star = intersection_project(sets, x_best, PROJECT_TOL)
    # f_star is the value at the re-projected point; the projection moves
    # x_best by at most the projection tolerance, so the change is far
    # below the achieved gap.
    f_star = float(sum(f.value(x_star) for f in objectives))
    return OracleSolution(
        x_star=x_star,
        f_star=f_star,
        method=f"projected-subgradient-polish/{backend_name}",
        achieved_tolerance=float(achieved),
        iterations=int(iters),
    )
