"""Convergence certificates computed from recorded trajectories.

Everything here is pure post-processing over immutable arrays: the
squared-distance Lyapunov value against a reference point, the max
pairwise consensus error, the stationarity residual with a min-norm
selection over the disagreement sign sets, and a log-linear rate fit.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import DiagnosticError, DomainError
from .objectives import TOL_SIGN, subgradient
from .sets import TOL_ACTIVE

# Default fit window as fractions of the record count: skips the initial
# transient and the terminal plateau where V sits on the stepsize noise
# floor.
RATE_WINDOW = (0.10, 0.60)

# V below this multiple of (1 + V[0]) is indistinguishable from exact
# convergence in float64; those records carry rounding noise, not rate
# information, and are cut from fits.
MACHINE_FLOOR_FACTOR = (64.0 * np.finfo(float).eps) ** 2

CSV_HEADER = "step,time,L,V,consensus,residual"


@dataclass
class RunRecord:
    """Recorded trajectory of one integrator run.

    ``states`` has shape (records, n, m); the scalar columns all have
    one entry per record. ``V_values`` is None when the run had no
    reference point.
    """

    steps: np.ndarray
    times: np.ndarray
    states: np.ndarray
    L_values: np.ndarray
    V_values: Optional[np.ndarray]
    consensus: np.ndarray
    residuals: np.ndarray
    K: float
    alpha: float
    seed: Optional[int]
    status: int

    @property
    def n_records(self):
        return self.states.shape[0]


@dataclass
class RateFit:
    slope: float
    intercept: float
    r_squared: float
    window: tuple


def lyapunov_v(xs, x_ref):
    """0.5 * sum_i ||x_i - x_ref_i||^2.

    ``x_ref`` may be a single vector (the consensus reference, broadcast
    to every agent) or a full (n, m) stack.
    """
    xs = np.asarray(xs, dtype=float)
    x_ref = np.asarray(x_ref, dtype=float)
    d = xs - x_ref
    return 0.5 * float(np.sum(d * d))


def consensus_error(xs):
    """Max pairwise distance max_{i,j} ||x_i - x_j||."""
    xs = np.asarray(xs, dtype=float)
    if xs.ndim == 1:
        xs = xs[:, None]
    d = xs[:, None, :] - xs[None, :, :]
    return float(np.sqrt((d * d).sum(axis=2)).max())


def optimality_residual(xs, p, tol_sign=TOL_SIGN):
    """Stationarity measure of the penalized flow at stacked states xs.

    Zero exactly when every agent admits a disagreement-sign selection
    making its tangent-projected velocity vanish. Coordinates with
    |x_i - x_j| <= tol_sign leave their selection free in [-1, 1]; the
    free selections are resolved coordinate-wise, shrinking each raw
    velocity coordinate toward zero by up to K per free neighbor. That
    clipping is the exact min-norm choice before projection, and an
    upper bound on the post-projection min, so zero still certifies
    stationarity.
    """
    xs = np.asarray(xs, dtype=float)
    worst = 0.0
    for i, (f, s) in enumerate(zip(p.objectives, p.sets)):
        x = xs[i]
        if s.normal_residual(x) > TOL_ACTIVE:
            raise DomainError(f"agent {i} state is infeasible")
        raw = -subgradient(f, x)
        n_free = np.zeros(p.dim)
        for j in p.graph.neighbors[i]:
            d = x - xs[j]
            fixed = np.abs(d) > tol_sign
            raw -= p.K * np.where(fixed, np.sign(d), 0.0)
            n_free += ~fixed
        slack = p.K * n_free
        pre = np.sign(raw) * np.maximum(0.0, np.abs(raw) - slack)
        worst = max(worst, float(np.linalg.norm(s.tangent_project(x, pre))))
    return worst


def _resolve_window(n, window):
    if window is None:
        lo = int(np.floor(RATE_WINDOW[0] * n))
        hi = int(np.ceil(RATE_WINDOW[1] * n))
    else:
        lo, hi = int(window[0]), int(window[1])
    return max(lo, 0), min(hi, n)


def fit_exponential_rate(record, window=None):
    """Least-squares slope of log V over a window of the trajectory.

    ``window`` is an index range (lo, hi); None applies the default
    fractional window. Records at or below the machine floor are cut
    from the tail (log of rounding noise has no rate content); an empty
    window after the cut raises DiagnosticError.
    """
    if record.V_values is None:
        raise DiagnosticError("run record has no V values; supply a reference")
    V = np.asarray(record.V_values, dtype=float)
    t = np.asarray(record.times, dtype=float)
    lo, hi = _resolve_window(V.shape[0], window)
    floor = MACHINE_FLOOR_FACTOR * (1.0 + float(V[0])) if V.shape[0] else 0.0
    dead = np.flatnonzero(V[lo:hi] <= floor)
    if dead.size:
        hi = lo + int(dead[0])
    if hi - lo < 2:
        raise DiagnosticError("rate-fit window is empty (V at machine zero)")
    tw = t[lo:hi]
    y = np.log(V[lo:hi])
    A = np.stack([tw, np.ones_like(tw)], axis=1)
    (slope, intercept), *_ = np.linalg.lstsq(A, y, rcond=None)
    resid = y - (slope * tw + intercept)
    ss_res = float(resid @ resid)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    # constant data never gives ss_tot exactly 0 in floats; anything at
    # the rounding scale of the mean is degenerate and fits perfectly
    eps = np.finfo(float).eps
    tot_floor = (8.0 * eps * (1.0 + float(np.abs(y).max()))) ** 2 * y.shape[0]
    r_squared = 1.0 if ss_tot <= tot_floor else max(0.0, 1.0 - ss_res / ss_tot)
    return RateFit(float(slope), float(intercept), r_squared, (lo, hi))


def _fmt(v):
    return "nan" if v is None else f"{v:.17g}"


def write_trajectory_csv(record, path):
    """One row per record point, floats at full precision."""
    V = record.V_values
    with open(path, "w") as fh:
        fh.write(CSV_HEADER + "\n")
        for k in range(record.n_records):
            row = (
                str(int(record.steps[k])),
                _fmt(float(record.times[k])),
                _fmt(float(record.L_values[k])),
                _fmt(None if V is None else float(V[k])),
                _fmt(float(record.consensus[k])),
                _fmt(float(record.residuals[k])),
            )
            fh.write(",".join(row) + "\n")


def summary_dict(record, fit=None, extras=None):
    """The summary mapping emitted next to the trajectory CSV."""
    out = {
        "K": float(record.K),
        "alpha": float(record.alpha),
        "seed": record.seed,
        "slope": None if fit is None else fit.slope,
        "r_squared": None if fit is None else fit.r_squared,
        "final_consensus": float(record.consensus[-1]),
        "final_residual": float(record.residuals[-1]),
    }
    if extras:
        out.update(extras)
    return out
