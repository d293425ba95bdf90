"""Threshold pruning thins decoded structures.

Entries at or below tau are zeroed before decoding. Exact zeros stay
edge-ineligible while still counting in the wiring denominator, so raising
tau strictly lowers the mean decoded edge count. Every non-end node keeps
one forced edge, which is the floor on how sparse a decode can get.
"""
from __future__ import annotations

from dagswarm import RngFactory, decode_dag, init_adjacency_swarm, prune_threshold


def main() -> None:
    factory = RngFactory(seed=0)
    matrices = init_adjacency_swarm(8, 500, factory.stream("init_matrices"))
    floor = 8 - 1  # one forced edge per non-end node

    print("tau    mean edges   zeroed entries")
    for tau in (0.0, 0.05, 0.1, 0.2, 0.4):
        total_edges = 0
        total_zeroed = 0
        for i, A in enumerate(matrices):
            pruned = prune_threshold(A, tau)
            total_zeroed += int((pruned == 0.0).sum() - (A == 0.0).sum())
            dag = decode_dag(pruned, 0.8, factory.stream("decode", 0, i))
            total_edges += len(dag.edges)
        print(f"{tau:<5}  {total_edges / len(matrices):<11.3f}  {total_zeroed / len(matrices):.1f}")
    print(f"\nedge count can never drop below {floor} for 8 nodes")


if __name__ == "__main__":
    main()
