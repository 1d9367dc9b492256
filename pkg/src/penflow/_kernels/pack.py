"""Flat-array packing of a ProblemInstance for the integration kernels.

Both objective families are expressed in the unified form

    f_i(x) = 0.5 x'P_i x + q_i . x + r_i |x - anchor_i|_1

and both set families as a kind code plus parameter rows, so the kernels
see nothing but contiguous float64/int64 arrays.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..objectives import L1PlusLinear, QuadPlusL1
from ..sets import Ball, Box

KIND_BOX = 0
KIND_BALL = 1


@dataclass
class PackedProblem:
    P: np.ndarray
    q: np.ndarray
    r: np.ndarray
    anchor: np.ndarray
    kind: np.ndarray
    lo: np.ndarray
    hi: np.ndarray
    cen: np.ndarray
    rad: np.ndarray
    eu: np.ndarray
    ev: np.ndarray
    K: float


def pack_agents(objectives, sets, m):
    """Per-agent arrays for (objective, set) pairs, without graph data."""
    n = len(objectives)
    P = np.zeros((n, m, m))
    q = np.zeros((n, m))
    r = np.zeros(n)
    anchor = np.zeros((n, m))
    kind = np.zeros(n, dtype=np.int64)
    lo = np.zeros((n, m))
    hi = np.zeros((n, m))
    cen = np.zeros((n, m))
    rad = np.zeros(n)
    for i, (f, s) in enumerate(zip(objectives, sets)):
        if isinstance(f, L1PlusLinear):
            q[i] = f.slope
            r[i] = 1.0
            anchor[i] = f.anchor
        elif isinstance(f, QuadPlusL1):
            P[i] = f.P
            q[i] = f.q
            r[i] = f.r
        else:
            raise TypeError(f"unsupported objective type {type(f).__name__}")
        if isinstance(s, Box):
            kind[i] = KIND_BOX
            lo[i] = s.lower
            hi[i] = s.upper
        elif isinstance(s, Ball):
            kind[i] = KIND_BALL
            cen[i] = s.center
            rad[i] = s.radius
        else:
            raise TypeError(f"unsupported set type {type(s).__name__}")
    return P, q, r, anchor, kind, lo, hi, cen, rad


def pack_problem(p):
    P, q, r, anchor, kind, lo, hi, cen, rad = pack_agents(
        p.objectives, p.sets, p.dim
    )
    eu, ev = p.graph.edge_arrays()
    return PackedProblem(
        P=P, q=q, r=r, anchor=anchor, kind=kind, lo=lo, hi=hi, cen=cen,
        rad=rad, eu=eu, ev=ev, K=float(p.K),
    )
