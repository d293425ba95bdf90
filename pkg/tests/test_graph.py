from __future__ import annotations

import numpy as np
import pytest

from dagswarm import (
    DagStructure,
    RngFactory,
    decode_dag,
    init_adjacency_swarm,
    prune_threshold,
    top_p_sample,
)


def test_init_swarm_degenerate_and_errors():
    matrices = init_adjacency_swarm(1, 3, RngFactory(0).stream("init_matrices"))
    assert len(matrices) == 3
    for m in matrices:
        assert m.shape == (1, 1)
        assert 0.0 <= m[0, 0] < 1.0
    with pytest.raises(ValueError):
        init_adjacency_swarm(0, 3, RngFactory(0).stream("init_matrices"))
    with pytest.raises(ValueError):
        init_adjacency_swarm(3, 0, RngFactory(0).stream("init_matrices"))


def test_init_swarm_uniform_mean():
    # 10^5 entries: empirical mean of U(0,1) within 0.5 +- 0.01
    matrices = init_adjacency_swarm(10, 1000, RngFactory(1).stream("init_matrices"))
    mean = np.mean([m.mean() for m in matrices])
    assert abs(mean - 0.5) < 0.01


def test_top_p_single_candidate():
    rng = RngFactory(0).stream("decode", 0, 0)
    for p in (0.01, 0.5, 1.0):
        assert top_p_sample([1.0], p, rng) == 0


def test_top_p_nucleus_cutoff():
    # prefix {0} already holds mass 0.9 >= 0.8, so index 1 is never drawn
    rng = RngFactory(2).stream("decode", 0, 0)
    draws = {top_p_sample([0.9, 0.1], 0.8, rng) for _ in range(1000)}
    assert draws == {0}


def test_top_p_even_split_frequency():
    rng = RngFactory(3).stream("decode", 0, 0)
    draws = [top_p_sample([0.5, 0.5], 0.8, rng) for _ in range(10_000)]
    freq = np.mean(draws)
    assert abs(freq - 0.5) < 0.02


def test_top_p_small_p_is_argmax_lowest_tie():
    rng = RngFactory(4).stream("decode", 0, 0)
    assert all(top_p_sample([0.2, 0.5, 0.3], 1e-9, rng) == 1 for _ in range(100))
    assert all(top_p_sample([0.4, 0.4, 0.2], 1e-9, rng) == 0 for _ in range(100))


def test_top_p_all_zero_uniform_fallback():
    rng = RngFactory(5).stream("decode", 0, 0)
    draws = [top_p_sample([0.0, 0.0, 0.0], 0.3, rng) for _ in range(3000)]
    counts = np.bincount(draws, minlength=3) / 3000
    assert np.all(np.abs(counts - 1 / 3) < 0.05)


def test_top_p_validation():
    rng = RngFactory(6).stream("decode", 0, 0)
    with pytest.raises(ValueError):
        top_p_sample([], 0.5, rng)
    with pytest.raises(ValueError):
        top_p_sample([0.2, -0.1], 0.5, rng)
    with pytest.raises(ValueError):
        top_p_sample([0.2], 0.0, rng)
    with pytest.raises(ValueError):
        top_p_sample([0.2], 1.5, rng)


def test_decode_single_node():
    dag = decode_dag(np.array([[0.4]]), 0.8, RngFactory(0).stream("decode", 0, 0))
    assert dag.n == 1 and dag.end_node == 0 and dag.edges == frozenset() and dag.topo_order == (0,)
    dag.validate()


def test_decode_two_node_near_deterministic():
    # row sums: node 0 -> 0.99, node 1 -> 0.01; at p=0.05 node 1 wins the
    # inverse-degree draw and the single edge 0 -> 1 follows
    A = np.array([[0.0, 0.99], [0.01, 0.0]])
    expected = DagStructure(2, 1, frozenset({(0, 1)}), (0, 1))
    rng = RngFactory(7).stream("decode", 0, 0)
    hits = sum(decode_dag(A, 0.05, rng) == expected for _ in range(10_000))
    assert hits >= 9500


def test_decode_validity_small_fuzz():
    rng = RngFactory(8)
    init = rng.stream("init_matrices")
    for i in range(500):
        n = int(init.integers(2, 7))
        A = init.uniform(0, 1, (n, n))
        dag = decode_dag(A, 0.8, rng.stream("decode", 0, i))
        dag.validate()
        # selection order is reversed topo order: edges go forward in topo
        position = {v: k for k, v in enumerate(dag.topo_order)}
        for u, v in dag.edges:
            assert position[u] < position[v]
        assert dag.topo_order[-1] == dag.end_node


def test_decode_rejects_non_square():
    with pytest.raises(ValueError):
        decode_dag(np.zeros((2, 3)), 0.8, RngFactory(0).stream("decode", 0, 0))


def test_prune_threshold_rule():
    A = np.array([[0.05, 0.15], [0.3, 0.0]])
    pruned = prune_threshold(A, 0.1)
    assert np.array_equal(pruned, [[0.0, 0.15], [0.3, 0.0]])
    # tau=0 only removes exact zeros (keeps everything positive unchanged)
    assert np.array_equal(prune_threshold(A, 0.0), [[0.05, 0.15], [0.3, 0.0]])
    with pytest.raises(ValueError):
        prune_threshold(A, 1.5)
    with pytest.raises(ValueError):
        prune_threshold(A, -0.1)


def test_prune_nonzero_count_monotone_in_tau():
    rng = RngFactory(9).stream("init_matrices")
    A = rng.uniform(0, 1, (8, 8))
    counts = [np.count_nonzero(prune_threshold(A, tau)) for tau in (0.0, 0.05, 0.1, 0.2, 0.9)]
    assert counts == sorted(counts, reverse=True)


def test_dag_serialization_roundtrip():
    dag = decode_dag(np.full((5, 5), 0.5), 0.8, RngFactory(10).stream("decode", 0, 0))
    clone = DagStructure.from_dict(dag.to_dict())
    assert clone == dag
    assert clone.to_dict() == dag.to_dict()


def test_dag_validation_rejects_broken_structures():
    with pytest.raises(ValueError):
        # end node with outgoing edge
        DagStructure(2, 1, frozenset({(1, 0)}), (1, 0)).validate()
    with pytest.raises(ValueError):
        # non-end node without outgoing edge
        DagStructure(3, 2, frozenset({(0, 2)}), (0, 1, 2)).validate()
    with pytest.raises(ValueError):
        # edge against topo order
        DagStructure(3, 2, frozenset({(1, 0), (0, 2), (1, 2)}), (0, 1, 2)).validate()
    with pytest.raises(ValueError):
        # topo order not a permutation
        DagStructure(3, 2, frozenset({(0, 2), (1, 2)}), (0, 0, 2)).validate()
