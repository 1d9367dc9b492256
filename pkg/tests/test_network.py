import numpy as np
import pytest

from penflow import ConfigError, NetworkGraph, build_topology, is_connected


class TestNamedTopologies:
    def test_star_hub_and_leaves(self):
        g = build_topology("star", 4)
        assert g.edges == ((0, 1), (0, 2), (0, 3))
        assert g.degree(0) == 3
        assert all(g.degree(i) == 1 for i in range(1, 4))

    def test_cycle_is_two_regular(self):
        g = build_topology("cycle", 30)
        assert g.edge_count == 30
        assert all(g.degree(i) == 2 for i in range(30))
        assert is_connected(g)

    def test_two_node_cycle_collapses_to_one_edge(self):
        g = build_topology("cycle", 2)
        assert g.edges == ((0, 1),)

    def test_erdos_renyi_reproducible_and_connected(self):
        a = build_topology("erdos_renyi", 12, p=0.3, seed=7)
        b = build_topology("erdos_renyi", 12, p=0.3, seed=7)
        assert a.edges == b.edges
        assert is_connected(a)

    def test_erdos_renyi_low_p_retries_until_connected(self):
        g = build_topology("erdos_renyi", 6, p=0.25, seed=0)
        assert is_connected(g)

    def test_erdos_renyi_p_one_is_complete(self):
        g = build_topology("erdos_renyi", 5, p=1.0, seed=0)
        assert g.edge_count == 10


class TestConnectivity:
    def test_single_node_is_connected(self):
        assert is_connected(NetworkGraph(1, []))

    def test_two_components_detected(self):
        g = NetworkGraph(4, [(0, 1), (2, 3)])
        assert not is_connected(g)

    def test_isolated_node_detected(self):
        g = NetworkGraph(3, [(0, 1)])
        assert not is_connected(g)


class TestGraphStructure:
    def test_edges_canonicalized_and_deduplicated(self):
        g = NetworkGraph(3, [(1, 0), (0, 1), (2, 1)])
        assert g.edges == ((0, 1), (1, 2))

    def test_neighbor_lists_sorted_symmetric(self):
        g = build_topology("star", 5)
        assert g.neighbors[0] == (1, 2, 3, 4)
        assert g.neighbors[3] == (0,)

    def test_edge_arrays_ordered(self):
        eu, ev = build_topology("cycle", 5).edge_arrays()
        assert eu.dtype == np.int64
        assert np.all(eu < ev)
        assert len(eu) == 5

    def test_csr_round_trip(self):
        g = build_topology("star", 4)
        indptr, indices = g.csr_arrays()
        for i in range(g.n):
            assert tuple(indices[indptr[i]: indptr[i + 1]]) == g.neighbors[i]


class TestValidation:
    def test_small_n_rejected(self):
        with pytest.raises(ConfigError):
            build_topology("star", 1)

    def test_unknown_kind_rejected(self):
        with pytest.raises(ConfigError):
            build_topology("torus", 4)

    def test_bad_probability_rejected(self):
        with pytest.raises(ConfigError):
            build_topology("erdos_renyi", 4, p=0.0)
        with pytest.raises(ConfigError):
            build_topology("erdos_renyi", 4, p=1.5)
        with pytest.raises(ConfigError):
            build_topology("erdos_renyi", 4)

    def test_from_edges_rejects_self_loop(self):
        with pytest.raises(ConfigError):
            NetworkGraph.from_edges(3, [(0, 0), (0, 1), (1, 2)])

    def test_from_edges_rejects_out_of_range(self):
        with pytest.raises(ConfigError):
            NetworkGraph.from_edges(3, [(0, 3)])

    def test_from_edges_rejects_disconnected(self):
        with pytest.raises(ConfigError):
            NetworkGraph.from_edges(4, [(0, 1), (2, 3)])

    def test_from_edges_allows_disconnected_when_asked(self):
        g = NetworkGraph.from_edges(4, [(0, 1), (2, 3)], require_connected=False)
        assert g.edge_count == 2

    def test_from_edges_rejects_malformed_edge(self):
        with pytest.raises(ConfigError):
            NetworkGraph.from_edges(3, [(0, 1, 2)])
