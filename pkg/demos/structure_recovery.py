"""Recover a hidden wiring from utility feedback alone.

The utility is 1 minus the normalized edit distance to a hidden 4-node
star (everyone feeds node 3). Structure-only search reads nothing but the
scalar score, yet the swarm of adjacency matrices homes in on the exact
graph within a few iterations.
"""
from __future__ import annotations

from dagswarm import RngFactory, RunConfig, build_utility, optimize, star_dag


def main() -> None:
    cfg = RunConfig(
        n_experts=4,
        mode="role_only",
        max_iterations=20,
        patience=20,
        seed=3,
        utility_spec={"name": "hidden_dag", "n": 4, "target": "star"},
    )
    utility = build_utility(cfg.utility_spec, RngFactory(cfg.seed).stream("task"))

    system, trace = optimize(cfg, None, utility)

    print("hidden target:", sorted(star_dag(4).edges), "end node", star_dag(4).end_node)
    for row in trace.rows:
        print(f"iteration {row.iteration:2d}  best utility {row.best_role_utility:.3f}")
    print("\nrecovered:", sorted(system.dag.edges), "end node", system.dag.end_node)
    print("exact match" if system.dag.edges == star_dag(4).edges else "partial match")


if __name__ == "__main__":
    main()
