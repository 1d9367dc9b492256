"""Penalized reformulation of the consensus-constrained problem.

The constrained problem min sum_i f_i(x) over the intersection of the
agents' sets is replaced by the separable-plus-coupling objective

    L(x) = sum_i f_i(x_i) + (K/2) sum_i sum_{j in N_i} |x_i - x_j|_1

over per-agent feasible sets. With K strictly larger than n times a
network-wide Lipschitz bound c on the objectives, the minimizers of L are
exactly the consensual replicas of the constrained minimizers, so the
penalty is exact and the factor can be chosen a priori from closed-form
bounds, no dual problem involved.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, DomainError
from .network import NetworkGraph
from .objectives import lipschitz_bound, strong_convexity_modulus

# Floor for the degenerate all-constant-objectives case (c = 0): any
# positive K certifies equivalence, but the consensus-forcing term must
# stay present.
K_FLOOR_PER_AGENT = 1e-6


@dataclass
class ProblemInstance:
    """A fully assembled multi-agent instance.

    Fields ``lipschitz_max`` (the certified network constant c) and
    ``strong_beta`` (minimum strong-convexity modulus across agents) are
    derived at construction. ``equivalence_certified`` records whether
    K > n*c holds, which is the exactness condition for the penalty.
    """

    dim: int
    graph: NetworkGraph
    objectives: tuple
    sets: tuple
    K: float
    lipschitz_max: float
    strong_beta: float
    equivalence_certified: bool
    gamma: float | None = field(default=None)

    @property
    def n_agents(self):
        return self.graph.n


def choose_penalty(objectives, sets, graph, gamma=1.05):
    """Penalty factor K = gamma * n * c with c = max_i lipschitz bound.

    Returns (K, c). gamma must exceed 1 so the strict inequality K > n*c
    holds with margin; the default 1.05 keeps the consensus term from
    needlessly inflating subgradient norms in the discretized flow.
    """
    gamma = float(gamma)
    if gamma <= 1.0:
        raise ConfigError("penalty safety factor gamma must be > 1")
    n = graph.n
    c = max(lipschitz_bound(f, s) for f, s in zip(objectives, sets))
    if c <= 0.0:
        return K_FLOOR_PER_AGENT * n, 0.0
    return gamma * n * c, c


def make_problem(objectives, sets, graph, penalty="auto", gamma=1.05):
    """Assemble a ProblemInstance, resolving the penalty factor.

    ``penalty`` is either the string "auto" (Lipschitz-based selection,
    certified exact) or an explicit nonnegative K. An explicit K is
    certified only when it exceeds n*c.
    """
    objectives = tuple(objectives)
    sets = tuple(sets)
    if not (len(objectives) == len(sets) == graph.n):
        raise ConfigError("objectives, sets, and graph disagree on agent count")
    dims = {o.dim for o in objectives} | {s.dim for s in sets}
    if len(dims) != 1:
        raise ConfigError(f"inconsistent dimensions across agents: {sorted(dims)}")
    m = dims.pop()
    c = max(lipschitz_bound(f, s) for f, s in zip(objectives, sets))
    if penalty == "auto":
        K, c = choose_penalty(objectives, sets, graph, gamma)
        certified = True
        gamma_used = gamma
    else:
        K = float(penalty)
        if K < 0.0:
            raise ConfigError("penalty factor K must be nonnegative")
        certified = K > graph.n * c
        gamma_used = None
    beta = min(strong_convexity_modulus(f) for f in objectives)
    return ProblemInstance(
        dim=m,
        graph=graph,
        objectives=objectives,
        sets=sets,
        K=float(K),
        lipschitz_max=float(c),
        strong_beta=float(beta),
        equivalence_certified=bool(certified),
        gamma=gamma_used,
    )


def _check_states(xs, n, m):
    xs = np.asarray(xs, dtype=float)
    if xs.shape != (n, m):
        raise DomainError(f"expected states of shape ({n}, {m}), got {xs.shape}")
    return xs


def penalized_value(p, xs):
    """L(x): agent objectives plus the l1 edge penalty.

    The double sum over neighbors counts every undirected edge twice, so
    with the leading K/2 each edge contributes K * |x_i - x_j|_1.
    """
    xs = _check_states(xs, p.n_agents, p.dim)
    total = sum(f.value(x) for f, x in zip(p.objectives, xs))
    eu, ev = p.graph.edge_arrays()
    if len(eu):
        total += p.K * float(np.sum(np.abs(xs[eu] - xs[ev])))
    return float(total)


def penalty_h(graph, xs):
    """Half the double sum of neighbor l1 distances (one K-free unit)."""
    xs = np.asarray(xs, dtype=float)
    eu, ev = graph.edge_arrays()
    if not len(eu):
        return 0.0
    return float(np.sum(np.abs(xs[eu] - xs[ev])))


def consensus_distance(xs):
    """Total l2 spread around the mean block: sum_k ||x_k - mean||."""
    xs = np.asarray(xs, dtype=float)
    center = xs.mean(axis=0)
    return float(np.sum(np.linalg.norm(xs - center, axis=1)))
