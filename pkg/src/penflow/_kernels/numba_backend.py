"""Numba twins of the numpy kernels.

Same call signatures and semantics as numpy_backend, written as scalar
loops so nopython compilation applies. Functions compile lazily on
first call and cache to disk. Floating-point results may differ from
the numpy path in the last bits (different summation order); each
backend is individually deterministic.
"""

from __future__ import annotations

import numpy as np
from numba import njit

STATUS_MAX_STEPS = 0
STATUS_STALLED = 1
STATUS_NONFINITE = 3

ORACLE_OK = 0
ORACLE_NO_PROJECTION = 2

PROX_MAX_SWEEPS = 200
PROX_TOL = 1e-14


@njit(cache=True)
def _sign_s(u, tol):
    if u > tol:
        return 1.0
    if u < -tol:
        return -1.0
    return 0.0


@njit(cache=True)
def _clip_s(u, lo, hi):
    if u < lo:
        return lo
    if u > hi:
        return hi
    return u


@njit(cache=True)
def _project_states(x, out, kind, lo, hi, cen, rad):
    n, m = x.shape
    for i in range(n):
        if kind[i] == 0:
            for k in range(m):
                out[i, k] = _clip_s(x[i, k], lo[i, k], hi[i, k])
        else:
            nd = 0.0
            for k in range(m):
                d = x[i, k] - cen[i, k]
                nd += d * d
            nd = np.sqrt(nd)
            if nd > rad[i]:
                sc = rad[i] / nd
                for k in range(m):
                    out[i, k] = cen[i, k] + (x[i, k] - cen[i, k]) * sc
            else:
                for k in range(m):
                    out[i, k] = x[i, k]


@njit(cache=True)
def _tangent_states(x, v, kind, lo, hi, cen, rad, tol_active):
    n, m = x.shape
    for i in range(n):
        if kind[i] == 0:
            for k in range(m):
                if x[i, k] <= lo[i, k] + tol_active and v[i, k] < 0.0:
                    v[i, k] = 0.0
                elif x[i, k] >= hi[i, k] - tol_active and v[i, k] > 0.0:
                    v[i, k] = 0.0
        else:
            nd = 0.0
            for k in range(m):
                d = x[i, k] - cen[i, k]
                nd += d * d
            nd = np.sqrt(nd)
            if nd >= rad[i] - tol_active:
                beta = 0.0
                for k in range(m):
                    beta += v[i, k] * (x[i, k] - cen[i, k]) / nd
                if beta > 0.0:
                    for k in range(m):
                        v[i, k] -= beta * (x[i, k] - cen[i, k]) / nd


@njit(cache=True)
def _penalized_value(x, P, q, r, anchor, eu, ev, K):
    n, m = x.shape
    total = 0.0
    for i in range(n):
        for k in range(m):
            acc = 0.0
            for j in range(m):
                acc += P[i, k, j] * x[i, j]
            total += 0.5 * acc * x[i, k] + q[i, k] * x[i, k]
            total += r[i] * abs(x[i, k] - anchor[i, k])
    for e in range(len(eu)):
        for k in range(m):
            total += K * abs(x[eu[e], k] - x[ev[e], k])
    return total


@njit(cache=True)
def _fused_prox(w, z, anchor, node_s, eu, ev, lam, mu, edge_s):
    n, m = w.shape
    for i in range(n):
        for k in range(m):
            z[i, k] = w[i, k] - mu[i, k]
    for e in range(len(eu)):
        for k in range(m):
            z[eu[e], k] -= lam[e, k]
            z[ev[e], k] += lam[e, k]
    tol = PROX_TOL * max(1.0, edge_s)
    for _ in range(PROX_MAX_SWEEPS):
        dmax = 0.0
        for e in range(len(eu)):
            u = eu[e]
            v = ev[e]
            for k in range(m):
                step = _clip_s(lam[e, k] + 0.5 * (z[u, k] - z[v, k]),
                               -edge_s, edge_s) - lam[e, k]
                z[u, k] -= step
                z[v, k] += step
                lam[e, k] += step
                if abs(step) > dmax:
                    dmax = abs(step)
        for i in range(n):
            si = node_s[i]
            if si == 0.0:
                continue
            for k in range(m):
                dm = _clip_s(mu[i, k] + (z[i, k] - anchor[i, k]),
                             -si, si) - mu[i, k]
                z[i, k] -= dm
                mu[i, k] += dm
                if abs(dm) > dmax:
                    dmax = abs(dm)
        if dmax <= tol:
            break


@njit(cache=True)
def integrate(x0, P, q, r, anchor, kind, lo, hi, cen, rad, eu, ev, K,
              alpha, max_steps, record_every, stop_tol, stall_records,
              tol_sign, tol_active, semi_implicit):
    n, m = x0.shape
    n_blocks = max_steps // record_every
    states = np.empty((n_blocks + 1, n, m))
    L_values = np.empty(n_blocks + 1)
    x = x0.copy()
    lam = np.zeros((len(eu), m))
    mu = np.zeros((n, m))
    node_s = alpha * r
    edge_s = alpha * K
    w = np.empty((n, m))
    z = np.empty((n, m))
    g = np.empty((n, m))
    for i in range(n):
        for k in range(m):
            states[0, i, k] = x[i, k]
    L_values[0] = _penalized_value(x, P, q, r, anchor, eu, ev, K)
    status = STATUS_MAX_STEPS
    fail_step = -1
    n_records = n_blocks + 1
    for rec in range(1, n_blocks + 1):
        for _ in range(record_every):
            for i in range(n):
                for k in range(m):
                    acc = q[i, k]
                    for j in range(m):
                        acc += P[i, k, j] * x[i, j]
                    g[i, k] = acc
            if semi_implicit:
                for i in range(n):
                    for k in range(m):
                        w[i, k] = x[i, k] - alpha * g[i, k]
                _fused_prox(w, z, anchor, node_s, eu, ev, lam, mu, edge_s)
                _project_states(z, x, kind, lo, hi, cen, rad)
            else:
                for i in range(n):
                    for k in range(m):
                        g[i, k] += r[i] * _sign_s(x[i, k] - anchor[i, k],
                                                  tol_sign)
                        z[i, k] = -g[i, k]
                for e in range(len(eu)):
                    for k in range(m):
                        sg = _sign_s(x[eu[e], k] - x[ev[e], k], tol_sign)
                        z[eu[e], k] -= K * sg
                        z[ev[e], k] += K * sg
                _tangent_states(x, z, kind, lo, hi, cen, rad, tol_active)
                for i in range(n):
                    for k in range(m):
                        w[i, k] = x[i, k] + alpha * z[i, k]
                _project_states(w, x, kind, lo, hi, cen, rad)
        for i in range(n):
            for k in range(m):
                states[rec, i, k] = x[i, k]
        L_values[rec] = _penalized_value(x, P, q, r, anchor, eu, ev, K)
        finite = True
        for i in range(n):
            for k in range(m):
                if not np.isfinite(x[i, k]):
                    finite = False
        if not finite:
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


@njit(cache=True)
def _project_intersection(x, kind, lo, hi, cen, rad, proj_tol, max_cycles):
    m = x.shape[0]
    n = kind.shape[0]
    for _ in range(max_cycles):
        moved = 0.0
        for i in range(n):
            if kind[i] == 0:
                for k in range(m):
                    xn = _clip_s(x[k], lo[i, k], hi[i, k])
                    if abs(xn - x[k]) > moved:
                        moved = abs(xn - x[k])
                    x[k] = xn
            else:
                nd = 0.0
                for k in range(m):
                    d = x[k] - cen[i, k]
                    nd += d * d
                nd = np.sqrt(nd)
                if nd > rad[i]:
                    sc = rad[i] / nd
                    for k in range(m):
                        xn = cen[i, k] + (x[k] - cen[i, k]) * sc
                        if abs(xn - x[k]) > moved:
                            moved = abs(xn - x[k])
                        x[k] = xn
        if moved < proj_tol:
            return True
    return False


@njit(cache=True)
def _oracle_f(x, P, q, r, anchor):
    n = P.shape[0]
    m = x.shape[0]
    fx = 0.0
    for i in range(n):
        for k in range(m):
            acc = 0.0
            for j in range(m):
                acc += P[i, k, j] * x[j]
            fx += 0.5 * acc * x[k] + q[i, k] * x[k]
            fx += r[i] * abs(x[k] - anchor[i, k])
    return fx


@njit(cache=True)
def _oracle_g(x, P, q, r, anchor, tol_sign, g):
    n = P.shape[0]
    m = x.shape[0]
    for k in range(m):
        g[k] = 0.0
    for i in range(n):
        for k in range(m):
            acc = q[i, k]
            for j in range(m):
                acc += P[i, k, j] * x[j]
            g[k] += acc + r[i] * _sign_s(x[k] - anchor[i, k], tol_sign)


@njit(cache=True)
def oracle_descent(x_init, P, q, r, anchor, kind, lo, hi, cen, rad,
                   a0, n_diminish, alpha0, polish_iters, n_phases,
                   tol, gap_window, tol_sign, proj_tol, proj_max_cycles,
                   grad_scale):
    m = x_init.shape[0]
    x = x_init.copy()
    ok = _project_intersection(x, kind, lo, hi, cen, rad, proj_tol,
                               proj_max_cycles)
    if not ok:
        return x, np.inf, np.inf, 0, ORACLE_NO_PROJECTION
    x_best = x.copy()
    f_best = _oracle_f(x, P, q, r, anchor)
    best_hist = np.full(gap_window + 1, np.inf)
    best_hist[0] = f_best
    g = np.empty(m)
    iters = 0
    achieved = np.inf
    for k in range(1, n_diminish + 1):
        step = a0 / np.sqrt(k)
        _oracle_g(x, P, q, r, anchor, tol_sign, g)
        for j in range(m):
            x[j] -= step * g[j]
        ok = _project_intersection(x, kind, lo, hi, cen, rad, proj_tol,
                                   proj_max_cycles)
        if not ok:
            return x_best, f_best, achieved, iters, ORACLE_NO_PROJECTION
        iters += 1
        fx = _oracle_f(x, P, q, r, anchor)
        if fx < f_best:
            f_best = fx
            x_best = x.copy()
        slot = iters % (gap_window + 1)
        old = best_hist[slot]
        best_hist[slot] = f_best
        gap = old - f_best
        if step * grad_scale <= 10.0 * tol and np.isfinite(gap):
            achieved = gap
            if gap < tol:
                return x_best, f_best, achieved, iters, ORACLE_OK
    alpha_p = alpha0
    for _ in range(n_phases):
        x = x_best.copy()
        done = False
        for _ in range(polish_iters):
            _oracle_g(x, P, q, r, anchor, tol_sign, g)
            for j in range(m):
                x[j] -= alpha_p * g[j]
            ok = _project_intersection(x, kind, lo, hi, cen, rad, proj_tol,
                                       proj_max_cycles)
            if not ok:
                return x_best, f_best, achieved, iters, ORACLE_NO_PROJECTION
            iters += 1
            fx = _oracle_f(x, P, q, r, anchor)
            if fx < f_best:
                f_best = fx
                x_best = x.copy()
            slot = iters % (gap_window + 1)
            old = best_hist[slot]
            best_hist[slot] = f_best
            gap = old - f_best
            if alpha_p * grad_scale <= 10.0 * tol and np.isfinite(gap):
                achieved = gap
                if gap < tol:
                    done = True
                    break
        if done:
            break
        alpha_p *= 0.5
    return x_best, f_best, achieved, iters, ORACLE_OK
