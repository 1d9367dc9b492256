"""Undirected communication graphs over the agent population.

Graphs are static for the lifetime of a run. Construction validates
symmetry, absence of self-loops, and (for the public constructors)
connectivity, so downstream code can assume a single component.
"""

from __future__ import annotations

from collections import deque

import numpy as np

from .errors import ConfigError


class NetworkGraph:
    """Immutable undirected graph with per-agent neighbor lists."""

    def __init__(self, n, edges):
        self.n = int(n)
        canon = sorted({(min(i, j), max(i, j)) for i, j in edges})
        self.edges = tuple((int(i), int(j)) for i, j in canon)
        nbrs = [[] for _ in range(self.n)]
        for i, j in self.edges:
            nbrs[i].append(j)
            nbrs[j].append(i)
        self.neighbors = tuple(tuple(sorted(ns)) for ns in nbrs)

    @classmethod
    def from_edges(cls, n, edges, require_connected=True):
        n = int(n)
        if n < 1:
            raise ConfigError("graph needs at least one node")
        for e in edges:
            if len(e) != 2:
                raise ConfigError(f"edge {e!r} is not a pair")
            i, j = int(e[0]), int(e[1])
            if i == j:
                raise ConfigError(f"self-loop at node {i}")
            if not (0 <= i < n and 0 <= j < n):
                raise ConfigError(f"edge ({i},{j}) out of range for n={n}")
        g = cls(n, [(int(i), int(j)) for i, j in edges])
        if require_connected and not is_connected(g):
            raise ConfigError("graph is not connected")
        return g

    def degree(self, i):
        return len(self.neighbors[i])

    @property
    def edge_count(self):
        return len(self.edges)

    def edge_arrays(self):
        """Endpoint arrays (eu, ev) with eu < ev, one row per edge."""
        if not self.edges:
            z = np.zeros(0, dtype=np.int64)
            return z, z.copy()
        eu, ev = np.array(self.edges, dtype=np.int64).T
        return np.ascontiguousarray(eu), np.ascontiguousarray(ev)

    def csr_arrays(self):
        """Neighbor lists packed as (indptr, indices) in CSR convention."""
        indptr = np.zeros(self.n + 1, dtype=np.int64)
        for i in range(self.n):
            indptr[i + 1] = indptr[i] + len(self.neighbors[i])
        indices = np.fromiter(
            (j for ns in self.neighbors for j in ns), dtype=np.int64, count=indptr[-1]
        )
        return indptr, indices

    def __repr__(self):
        return f"NetworkGraph(n={self.n}, edges={len(self.edges)})"


def is_connected(g):
    """Breadth-first reachability check; a single node is connected."""
    if g.n <= 1:
        return True
    seen = np.zeros(g.n, dtype=bool)
    queue = deque([0])
    seen[0] = True
    while queue:
        i = queue.popleft()
        for j in g.neighbors[i]:
            if not seen[j]:
                seen[j] = True
                queue.append(j)
    return bool(seen.all())


def build_topology(kind, n, p=None, seed=None, max_tries=100):
    """Construct a named topology.

    Parameters
    ----------
    kind : {"star", "cycle", "erdos_renyi"}
        Family name. A star has hub node 0; a cycle over two nodes
        collapses to the single edge (0, 1).
    n : int
        Agent count, at least 2.
    p, seed : float, int
        Edge probability and RNG seed, for "erdos_renyi" only. Sampling
        retries until the draw is connected.
    """
    n = int(n)
    if n < 2:
        raise ConfigError("topologies require n >= 2")
    if kind == "star":
        return NetworkGraph(n, [(0, i) for i in range(1, n)])
    if kind == "cycle":
        if n == 2:
            return NetworkGraph(2, [(0, 1)])
        return NetworkGraph(n, [(i, (i + 1) % n) for i in range(n)])
    if kind == "erdos_renyi":
        if p is None or not (0.0 < float(p) <= 1.0):
            raise ConfigError("erdos_renyi needs an edge probability in (0, 1]")
        rng = np.random.default_rng(seed)
        for _ in range(max_tries):
            edges = [
                (i, j)
                for i in range(n)
                for j in range(i + 1, n)
                if rng.random() < p
            ]
            g = NetworkGraph(n, edges)
            if is_connected(g):
                return g
        raise ConfigError(
            f"no connected erdos_renyi draw in {max_tries} tries (p={p}, n={n})"
        )
    raise ConfigError(f"unknown topology kind {kind!r}")
