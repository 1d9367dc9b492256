"""Distributed penalized flow and its fixed-step time discretization.

Each agent moves along its own tangent-projected descent direction built
from purely local data: its objective subgradient, its constraint set,
and the sign of the disagreement with graph neighbors. ``velocity`` and
``euler_step`` expose one synchronous round of the explicit scheme;
``run`` integrates whole trajectories through the compiled kernels.

Two schemes are available. ``explicit`` applies a subgradient selection
and steps through it, which mirrors the flow definition one-to-one but
chatters at the l1 kinks with amplitude proportional to alpha*K, so its
terminal accuracy is stepsize-limited. ``semi_implicit`` (the default)
takes the forward step only on the smooth part and treats every l1 term
(anchors and edge disagreements) by an exact per-coordinate proximal
solve, so kink coordinates land exactly on them and park; it selects a
valid subgradient element at the landing point, and reaches consensus
and stationarity to machine precision. Both schemes re-project after
every step, so recorded states are feasible regardless of scheme.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np

from ._kernels import get_backend, pack_problem
from ._kernels.numpy_backend import (
    STATUS_MAX_STEPS,
    STATUS_NONFINITE,
    STATUS_STALLED,
)
from .diagnostics import RunRecord, consensus_error, lyapunov_v, optimality_residual
from .errors import ConfigError, DomainError, NumericalFailureError
from .objectives import TOL_SIGN, sign_select, subgradient
from .sets import TOL_ACTIVE

logger = logging.getLogger(__name__)

# The run stops once the recorded objective has failed to drop over this
# many consecutive record points (relative scale 1 + |L|). A window this
# wide cannot be fooled by the flat stretches between kink landings.
STALL_RECORDS = 100

SCHEMES = ("semi_implicit", "explicit")


@dataclass
class AgentState:
    """One agent's view: current feasible iterate and last velocity."""

    x: np.ndarray
    last_velocity: Optional[np.ndarray] = None


@dataclass
class IntegratorConfig:
    alpha: float = 1e-3
    max_steps: int = 200_000
    stop_tol: float = 1e-12
    record_every: int = 50
    scheme: str = "semi_implicit"

    def validate(self):
        if not self.alpha > 0.0:
            raise ConfigError("alpha must be positive")
        if int(self.max_steps) < 1:
            raise ConfigError("max_steps must be at least 1")
        if int(self.record_every) < 1:
            raise ConfigError("record_every must be at least 1")
        if not self.stop_tol >= 0.0:
            raise ConfigError("stop_tol must be nonnegative")
        if self.scheme not in SCHEMES:
            raise ConfigError(f"scheme must be one of {SCHEMES}")
        return self


def velocity(i, xs, p, tol_sign=TOL_SIGN):
    """Tangent-projected descent direction of agent i at stacked states xs.

    Uses only agent i's objective, set, state, and its neighbors'
    states. The base point must be feasible.
    """
    xs = np.asarray(xs, dtype=float)
    x = xs[i]
    if p.sets[i].normal_residual(x) > TOL_ACTIVE:
        raise DomainError(f"agent {i} state is infeasible")
    g = subgradient(p.objectives[i], x)
    pull = np.zeros(p.dim)
    for j in p.graph.neighbors[i]:
        pull += sign_select(x - xs[j], tol_sign)
    return p.sets[i].tangent_project(x, -g - p.K * pull)


def velocities(xs, p, tol_sign=TOL_SIGN):
    xs = np.asarray(xs, dtype=float)
    return np.stack([velocity(i, xs, p, tol_sign) for i in range(p.n_agents)])


def euler_step(xs, p, alpha, tol_sign=TOL_SIGN):
    """One synchronous explicit round: all velocities are evaluated at
    the pre-step states, then every agent steps and re-projects."""
    xs = np.asarray(xs, dtype=float)
    vs = velocities(xs, p, tol_sign)
    return np.stack(
        [s.project(x + alpha * v) for s, x, v in zip(p.sets, xs, vs)]
    )


def velocity_norm_bound(p):
    """max_i (c_i + K * deg_i * sqrt(m)): bounds any velocity norm."""
    root_m = np.sqrt(p.dim)
    return max(
        f.lipschitz_bound(s) + p.K * p.graph.degree(i) * root_m
        for i, (f, s) in enumerate(zip(p.objectives, p.sets))
    )


def run(p, x0, cfg=None, seed=None, reference=None, backend=None):
    """Integrate the flow from stacked initial states x0.

    Records every ``record_every`` steps (record 0 is the initial
    state) until max_steps, or earlier once the recorded objective has
    stalled for STALL_RECORDS consecutive records. Infeasible initial
    blocks are projected once, with a logged warning. ``reference`` is
    an optional consensus point; when given, the record carries V
    values against it. ``seed`` is provenance only; the integration
    itself is deterministic given x0 and config.

    Raises NumericalFailureError if a non-finite state appears.
    """
    cfg = (cfg or IntegratorConfig()).validate()
    x0 = np.asarray(x0, dtype=float)
    if x0.shape != (p.n_agents, p.dim):
        raise DomainError(
            f"x0 must have shape ({p.n_agents}, {p.dim}), got {x0.shape}"
        )
    x0 = x0.copy()
    for i, s in enumerate(p.sets):
        if s.normal_residual(x0[i]) > TOL_ACTIVE:
            logger.warning("initial state of agent %d projected onto its set", i)
            x0[i] = s.project(x0[i])

    packed = pack_problem(p)
    mod, backend_name = get_backend(backend)
    states, L_values, n_records, status, fail_step = mod.integrate(
        x0,
        packed.P,
        packed.q,
        packed.r,
        packed.anchor,
        packed.kind,
        packed.lo,
        packed.hi,
        packed.cen,
        packed.rad,
        packed.eu,
        packed.ev,
        packed.K,
        float(cfg.alpha),
        int(cfg.max_steps),
        int(cfg.record_every),
        float(cfg.stop_tol),
        STALL_RECORDS,
        TOL_SIGN,
        TOL_ACTIVE,
        cfg.scheme == "semi_implicit",
    )
    if status == STATUS_NONFINITE:
        raise NumericalFailureError(f"non-finite state at step {fail_step}")
    states = states[:n_records]
    L_values = L_values[:n_records]
    steps = np.arange(n_records, dtype=np.int64) * int(cfg.record_every)
    times = steps * float(cfg.alpha)
    consensus = np.array([consensus_error(s) for s in states])
    residuals = np.array([optimality_residual(s, p) for s in states])
    V = None
    if reference is not None:
        reference = np.asarray(reference, dtype=float)
        V = np.array([lyapunov_v(s, reference) for s in states])
    logger.info(
        "run finished: backend=%s scheme=%s records=%d status=%d",
        backend_name,
        cfg.scheme,
        n_records,
        status,
    )
    return RunRecord(
        steps=steps,
        times=times,
        states=states,
        L_values=L_values,
        V_values=V,
        consensus=consensus,
        residuals=residuals,
        K=p.K,
        alpha=float(cfg.alpha),
        seed=seed,
        status=status,
    )
