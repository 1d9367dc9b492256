"""Pure-numpy integration and oracle kernels.

Reference implementation: vectorized across agents and coordinates, with
plain python loops over steps and graph edges. The numba backend mirrors
these semantics loop-for-loop; parity between the two is covered by tests.
"""

from __future__ import annotations

import numpy as np

STATUS_MAX_STEPS = 0
STATUS_STALLED = 1
STATUS_NONFINITE = 3

ORACLE_OK = 0
ORACLE_NO_PROJECTION = 2

PROX_MAX_SWEEPS = 200
PROX_TOL = 1e-14


def _sign(u, tol):
    return np.where(u > tol, 1.0, np.where(u < -tol, -1.0, 0.0))


def _project_states(x, kind, lo, hi, cen, rad):
    out = x.copy()
    box = kind == 0
    if box.any():
        out[box] = np.clip(x[box], lo[box], hi[box])
    for i in np.flatnonzero(kind == 1):
        d = x[i] - cen[i]
        nd = np.linalg.norm(d)
        if nd > rad[i]:
            out[i] = cen[i] + d * (rad[i] / nd)
    return out


def _tangent_states(x, v, kind, lo, hi, cen, rad, tol_active):
    out = v.copy()
    box = kind == 0
    if box.any():
        xb = x[box]
        vb = out[box]
        vb[(xb <= lo[box] + tol_active) & (vb < 0.0)] = 0.0
        vb[(xb >= hi[box] - tol_active) & (vb > 0.0)] = 0.0
        out[box] = vb
    for i in np.flatnonzero(kind == 1):
        d = x[i] - cen[i]
        nd = np.linalg.norm(d)
        if nd >= rad[i] - tol_active:
            u = d / nd
            beta = max(0.0, float(out[i] @ u))
            out[i] = out[i] - beta * u
    return out


def _smooth_grad(x, P, q):
    return np.einsum("nij,nj->ni", P, x) + q


def _penalized_value(x, P, q, r, anchor, eu, ev, K):
    quad = 0.5 * np.einsum("ni,ni->", x, np.einsum("nij,nj->ni", P, x))
    lin = float(np.sum(q * x))
    l1 = float(np.sum(r * np.sum(np.abs(x - anchor), axis=1)))
    edge = float(np.sum(np.abs(x[eu] - x[ev]))) if len(eu) else 0.0
    return quad + lin + l1 + K * edge


def _fused_prox(w, anchor, node_s, eu, ev, lam, mu, edge_s):
    """argmin_z 0.5||z - w||^2 + sum_i node_s[i] |z_i - anchor_i|_1
    + edge_s * sum_e |z_u - z_v|_1, solved coordinate-exactly by
    projected dual coordinate ascent with warm-started multipliers."""
    z = w.copy()
    for e in range(len(eu)):
        z[eu[e]] -= lam[e]
        z[ev[e]] += lam[e]
    z -= mu
    tol = PROX_TOL * max(1.0, edge_s)
    for _ in range(PROX_MAX_SWEEPS):
        dmax = 0.0
        for e in range(len(eu)):
            u, v = eu[e], ev[e]
            step = np.clip(lam[e] + 0.5 * (z[u] - z[v]), -edge_s, edge_s) - lam[e]
            z[u] -= step
            z[v] += step
            lam[e] += step
            dmax = max(dmax, float(np.abs(step).max()))
        for i in range(z.shape[0]):
            si = node_s[i]
            if si == 0.0:
                continue
            dm = np.clip(mu[i] + (z[i] - anchor[i]), -si, si) - mu[i]
            z[i] -= dm
            mu[i] += dm
            dmax = max(dmax, float(np.abs(dm).max()))
        if dmax <= tol:
            break
    return z


def integrate(x0, P, q, r, anchor, kind, lo, hi, cen, rad, eu, ev, K,
              alpha, max_steps, record_every, stop_tol, stall_records,
              tol_sign, tol_active, semi_implicit):
    """Fixed-step integration of the penalized consensus flow.

    Records the state and penalized value after every ``record_every``
    steps (record 0 is the initial state). Stops early once the recorded
    penalized value has stalled over ``stall_records`` consecutive
    records, or when a non-finite state appears.

    Returns (states, L_values, n_records, status, fail_step).
    """
    n, m = x0.shape
    n_blocks = int(max_steps) // int(record_every)
    states = np.empty((n_blocks + 1, n, m))
    L_values = np.empty(n_blocks + 1)
    x = x0.copy()
    lam = np.zeros((len(eu), m))
    mu = np.zeros((n, m))
    node_s = alpha * r
    edge_s = alpha * K
    states[0] = x
    L_values[0] = _penalized_value(x, P, q, r, anchor, eu, ev, K)
    status = STATUS_MAX_STEPS
    fail_step = -1
    n_records = n_blocks + 1
    for rec in range(1, n_blocks + 1):
        for _ in range(record_every):
            if semi_implicit:
                w = x - alpha * _smooth_grad(x, P, q)
                z = _fused_prox(w, anchor, node_s, eu, ev, lam, mu, edge_s)
                x = _project_states(z, kind, lo, hi, cen, rad)
            else:
                g = _smooth_grad(x, P, q) + r[:, None] * _sign(x - anchor, tol_sign)
                s = np.zeros((n, m))
                for e in range(len(eu)):
                    sg = _sign(x[eu[e]] - x[ev[e]], tol_sign)
                    s[eu[e]] += sg
                    s[ev[e]] -= sg
                v = _tangent_states(x, -g - K * s, kind, lo, hi, cen, rad, tol_active)
                x = _project_states(x + alpha * v, kind, lo, hi, cen, rad)
        states[rec] = x
        L_values[rec] = _penalized_value(x, P, q, r, anchor, eu, ev, K)
        if not np.isfinite(x).all():
            status = STATUS_NONFINITE
            fail_step = rec * record_every
            n_records = rec + 1
            break
        if rec >= stall_records:
            drop = L_values[rec - stall_records] - L_values[rec]
            if drop <= stop_tol * (1.0 + abs(L_values[rec])):
                status = STATUS_STALLED
                n_records = rec + 1
                break
    return states, L_values, n_records, status, fail_step


def _project_intersection(y, kind, lo, hi, cen, rad, proj_tol, max_cycles):
    """Cyclic projections onto every set until a full cycle moves less
    than proj_tol. Returns (point, converged)."""
    x = y.copy()
    box = kind == 0
    for _ in range(max_cycles):
        moved = 0.0
        for i in range(len(kind)):
            if box[i]:
                xn = np.clip(x, lo[i], hi[i])
            else:
                d = x - cen[i]
                nd = np.linalg.norm(d)
                xn = cen[i] + d * (rad[i] / nd) if nd > rad[i] else x
            moved = max(moved, float(np.max(np.abs(xn - x))))
            x = xn
        if moved < proj_tol:
            return x, True
    return x, False


def oracle_descent(x_init, P, q, r, anchor, kind, lo, hi, cen, rad,
                   a0, n_diminish, alpha0, polish_iters, n_phases,
                   tol, gap_window, tol_sign, proj_tol, proj_max_cycles,
                   grad_scale):
    """Centralized projected subgradient descent on F(x) = sum_i f_i(x)
    over the intersection of all sets.

    Diminishing-step stage a0/sqrt(k) followed by restarted fixed-step
    polish phases with halving stepsize, tracking the best value seen.
    The trailing-window gap test is armed once the step scale resolves
    the target tolerance, so early large-step orbits cannot fake
    convergence. Returns (x_best, f_best, achieved_gap, iters, status).
    """
    def F(x):
        fx = 0.5 * np.einsum("i,nij,j->", x, P, x)
        fx += float(np.sum(q @ x))
        fx += float(np.sum(r * np.sum(np.abs(x[None, :] - anchor), axis=1)))
        return fx

    def G(x):
        return (np.einsum("nij,j->i", P, x) + q.sum(axis=0)
                + (r[:, None] * _sign(x[None, :] - anchor, tol_sign)).sum(axis=0))

    def proj(y):
        return _project_intersection(y, kind, lo, hi, cen, rad, proj_tol,
                                     proj_max_cycles)

    x, ok = proj(x_init.copy())
    if not ok:
        return x, np.inf, np.inf, 0, ORACLE_NO_PROJECTION
    x_best = x.copy()
    f_best = F(x)
    best_hist = np.full(gap_window + 1, np.inf)
    best_hist[0] = f_best
    iters = 0
    achieved = np.inf

    def record_best(x, fx, step_scale):
        nonlocal f_best, x_best, achieved
        iters_mod = iters % (gap_window + 1)
        if fx < f_best:
            f_best = fx
            x_best = x.copy()
        old = best_hist[iters_mod]
        best_hist[iters_mod] = f_best
        gap = old - f_best
        armed = step_scale * grad_scale <= 10.0 * tol
        if armed and np.isfinite(gap):
            achieved = gap
            return gap < tol
        return False

    for k in range(1, n_diminish + 1):
        step = a0 / np.sqrt(k)
        x, ok = proj(x - step * G(x))
        if not ok:
            return x_best, f_best, achieved, iters, ORACLE_NO_PROJECTION
        iters += 1
        if record_best(x, F(x), step):
            return x_best, f_best, achieved, iters, ORACLE_OK
    alpha_p = alpha0
    for _ in range(n_phases):
        x = x_best.copy()
        done = False
        for _ in range(polish_iters):
            x, ok = proj(x - alpha_p * G(x))
            if not ok:
                return x_best, f_best, achieved, iters, ORACLE_NO_PROJECTION
            iters += 1
            if record_best(x, F(x), alpha_p):
                done = True
                break
        if done:
            break
        alpha_p *= 0.5
    return x_best, f_best, achieved, iters, ORACLE_OK
