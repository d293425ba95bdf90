"""Continuous adjacency matrices and their decoding into executable DAGs.

A candidate structure is an n x n real matrix whose entry (i, j) scores the
likelihood of a directed edge i -> j. Decoding picks an end node biased
toward small out-degree, orders the remaining nodes by out-degree mass, and
wires each newly placed node to already placed ones by softmax-weighted
coin flips, so every decode is a valid DAG with a single sink.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# Floor added to out-degree sums before inversion; keeps all-zero rows finite.
DEGREE_EPS = 1e-6


def init_adjacency_swarm(n: int, count: int, rng: np.random.Generator) -> list[np.ndarray]:
    """``count`` matrices with i.i.d. uniform(0, 1) entries."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if count < 1:
        raise ValueError("count must be >= 1")
    return [rng.random((n, n)) for _ in range(count)]


def top_p_sample(scores, p: float, rng: np.random.Generator) -> int:
    """Nucleus sampling over non-negative scores.

    Scores are normalized into a distribution, sorted descending (ties keep
    ascending index order), truncated to the smallest prefix with cumulative
    mass >= p, renormalized and sampled. All-zero scores fall back to a
    uniform draw over all indices.
    """
    s = np.asarray(scores, dtype=float)
    if s.ndim != 1 or s.size == 0:
        raise ValueError("scores must be a non-empty 1-d sequence")
    if np.any(s < 0):
        raise ValueError("scores must be non-negative")
    if not 0.0 < p <= 1.0:
        raise ValueError("p must be in (0, 1]")
    total = s.sum()
    if total <= 0.0:
        return int(rng.integers(s.size))
    probs = s / total
    order = np.argsort(-probs, kind="stable")
    cutoff = int(np.searchsorted(np.cumsum(probs[order]), p)) + 1
    kept = order[:cutoff]
    cdf = np.cumsum(probs[kept])
    draw = rng.random() * cdf[-1]
    return int(kept[min(int(np.searchsorted(cdf, draw, side="right")), cutoff - 1)])


@dataclass(frozen=True)
class DagStructure:
    """Decoded graph: edge (u, v) feeds u's output into v.

    ``topo_order`` is an execution order (every edge points forward in it);
    the end node is always last.
    """

    n: int
    end_node: int
    edges: frozenset[tuple[int, int]]
    topo_order: tuple[int, ...]

    def predecessors(self, v: int) -> list[int]:
        pos = {node: k for k, node in enumerate(self.topo_order)}
        return sorted((u for u, w in self.edges if w == v), key=pos.get)

    def validate(self) -> None:
        if sorted(self.topo_order) != list(range(self.n)):
            raise ValueError("topo_order is not a permutation of nodes")
        pos = {node: k for k, node in enumerate(self.topo_order)}
        for u, v in self.edges:
            if pos[u] >= pos[v]:
                raise ValueError(f"edge {u}->{v} violates topo_order")
        out_degree = [0] * self.n
        for u, _ in self.edges:
            out_degree[u] += 1
        if out_degree[self.end_node] != 0:
            raise ValueError("end node has outgoing edges")
        if self.topo_order[-1] != self.end_node:
            raise ValueError("end node is not last in topo_order")
        for node in range(self.n):
            if node != self.end_node and out_degree[node] == 0:
                raise ValueError(f"non-end node {node} has out-degree 0")
        # Every node must reach the end node along directed edges.
        incoming: dict[int, list[int]] = {v: [] for v in range(self.n)}
        for u, v in self.edges:
            incoming[v].append(u)
        seen = {self.end_node}
        frontier = [self.end_node]
        while frontier:
            v = frontier.pop()
            for u in incoming[v]:
                if u not in seen:
                    seen.add(u)
                    frontier.append(u)
        if len(seen) != self.n:
            raise ValueError("some nodes cannot reach the end node")

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "end_node": self.end_node,
            "edges": sorted(list(e) for e in self.edges),
            "topo_order": list(self.topo_order),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "DagStructure":
        dag = cls(
            n=int(data["n"]),
            end_node=int(data["end_node"]),
            edges=frozenset((int(u), int(v)) for u, v in data["edges"]),
            topo_order=tuple(int(x) for x in data["topo_order"]),
        )
        dag.validate()
        return dag


def decode_dag(A: np.ndarray, p: float, rng: np.random.Generator) -> DagStructure:
    """Decode one DAG from a continuous adjacency matrix.

    The end node is drawn by top-p over inverse out-degree sums. Remaining
    nodes are placed one at a time by top-p over their out-degree sums; a
    newly placed node u gains edge u -> v to each already placed v
    independently with probability exp(a_uv) / sum over placed i of
    exp(a_ui). Exact-zero entries are ineligible as edges (they still count
    in the denominator), which lets threshold pruning suppress edges. A node
    that drew no edge is wired to its argmax-entry placed node, so every
    non-end node keeps a path to the end.
    """
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError("adjacency matrix must be square")
    n = A.shape[0]
    if n == 1:
        return DagStructure(1, 0, frozenset(), (0,))

    out_sums = A.sum(axis=1) - np.diagonal(A)
    end = top_p_sample(1.0 / (out_sums + DEGREE_EPS), p, rng)

    placed = [end]
    remaining = [v for v in range(n) if v != end]
    edges: list[tuple[int, int]] = []
    while remaining:
        u = remaining.pop(top_p_sample(out_sums[remaining], p, rng))
        placed_arr = np.asarray(placed)
        row = A[u, placed_arr]
        weights = np.exp(row)
        probs = weights / weights.sum()
        hits = (rng.random(len(placed)) < probs) & (row > 0.0)
        if hits.any():
            edges.extend((u, int(v)) for v in placed_arr[hits])
        else:
            candidates = sorted(placed)
            forced = candidates[int(np.argmax(A[u, candidates]))]
            edges.append((u, forced))
        placed.append(u)

    return DagStructure(n, end, frozenset(edges), tuple(reversed(placed)))


def prune_threshold(A: np.ndarray, tau: float) -> np.ndarray:
    """Zero out entries <= tau; kept entries are unchanged."""
    if not 0.0 <= tau <= 1.0:
        raise ValueError("tau must be in [0, 1]")
    A = np.asarray(A, dtype=float)
    return np.where(A > tau, A, 0.0)
