"""Utility functions scoring instantiated systems, plus a small registry.

A utility maps (dag, assignment, pool) to a scalar, higher is better, and
declares its dataset size so optimization budgets can be audited. Built-in
families: constant (termination tests), hidden-DAG recovery (structure
search benchmarks), affine target (joint structure and weight benchmarks)
and text datasets scored by exact match (remote mode).
"""
from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .executor import AffineEvaluator, Assignment, Message, NodeEvaluator, execute
from .graph import DagStructure


class UtilityFunction:
    """Interface: ``evaluate`` is pure given the instance's dataset."""

    dataset_size: int = 1
    evaluator: NodeEvaluator | None = None

    def evaluate(self, dag: DagStructure, assignment: Assignment, pool) -> float:
        raise NotImplementedError

    @property
    def evaluator_calls(self) -> int:
        return self.evaluator.calls if self.evaluator is not None else 0


class ConstantUtility(UtilityFunction):
    def __init__(self, value: float = 0.0):
        self.value = float(value)
        self.dataset_size = 1

    def evaluate(self, dag, assignment, pool) -> float:
        return self.value


def edit_distance(a: DagStructure, b: DagStructure) -> int:
    """Symmetric difference of edge sets plus an end-node mismatch penalty."""
    if a.n != b.n:
        raise ValueError("graphs must have the same node count")
    return len(a.edges ^ b.edges) + (1 if a.end_node != b.end_node else 0)


def normalized_edit_distance(a: DagStructure, b: DagStructure) -> float:
    return edit_distance(a, b) / (a.n * (a.n - 1) + 1)


def chain_dag(n: int) -> DagStructure:
    edges = frozenset((k, k + 1) for k in range(n - 1))
    return DagStructure(n, n - 1, edges, tuple(range(n)))


def star_dag(n: int) -> DagStructure:
    """All nodes feed the end node directly."""
    end = n - 1
    edges = frozenset((k, end) for k in range(n - 1))
    return DagStructure(n, end, edges, tuple(range(n)))


def diamond_dag() -> DagStructure:
    return DagStructure(4, 3, frozenset({(0, 1), (0, 2), (1, 3), (2, 3)}), (0, 1, 2, 3))


class DagRecoveryUtility(UtilityFunction):
    """1 - normalized edit distance to a hidden target DAG."""

    def __init__(self, target: DagStructure):
        target.validate()
        self.target = target
        self.dataset_size = 1

    def evaluate(self, dag, assignment, pool) -> float:
        return 1.0 - normalized_edit_distance(dag, self.target)


class AffineTargetUtility(UtilityFunction):
    """Negative mean squared error of system outputs against target vectors."""

    def __init__(self, inputs: list[np.ndarray], targets: list[np.ndarray]):
        if len(inputs) != len(targets) or not inputs:
            raise ValueError("inputs and targets must be non-empty and equal length")
        self.inputs = [np.asarray(x, dtype=float) for x in inputs]
        self.targets = [np.asarray(y, dtype=float) for y in targets]
        self.dataset_size = len(inputs)
        self.evaluator = AffineEvaluator()

    def evaluate(self, dag, assignment, pool) -> float:
        error = 0.0
        for x, y in zip(self.inputs, self.targets):
            out = execute(dag, assignment, pool, Message(x), self.evaluator)
            error += float(np.sum((out.payload - y) ** 2))
        return -error / self.dataset_size


def make_affine_task(
    rng: np.random.Generator,
    n: int = 4,
    dim: int = 2,
    points: int = 4,
    scale: float = 0.9,
    structure: DagStructure | None = None,
) -> AffineTargetUtility:
    """Affine-target task whose answers come from a hidden system.

    The hidden system runs one shared expert (uniform(-scale, scale)
    parameters) at every position of ``structure`` (default: a chain), so
    both the right structure and the right weights are needed to reach zero
    error.
    """
    if structure is None:
        structure = chain_dag(n)
    shared = rng.uniform(-scale, scale, dim * dim + dim)
    hidden_pool = [shared] * structure.n
    evaluator = AffineEvaluator()
    inputs = [rng.uniform(-1, 1, dim) for _ in range(points)]
    targets = [
        np.asarray(
            execute(structure, Assignment.identity(structure.n), hidden_pool, Message(x), evaluator).payload
        )
        for x in inputs
    ]
    return AffineTargetUtility(inputs, targets)


class DatasetUtility(UtilityFunction):
    """Exact-match accuracy over text items (remote mode)."""

    def __init__(self, items: list[dict], evaluator: NodeEvaluator):
        if not items:
            raise ValueError("dataset is empty")
        for item in items:
            if "input" not in item or "answer" not in item:
                raise ValueError("dataset items need 'input' and 'answer' fields")
        self.items = items
        self.dataset_size = len(items)
        self.evaluator = evaluator

    def evaluate(self, dag, assignment, pool) -> float:
        correct = 0
        for item in self.items:
            out = execute(dag, assignment, pool, Message(str(item["input"])), self.evaluator)
            correct += int(str(out.payload).strip() == str(item["answer"]).strip())
        return correct / self.dataset_size


def load_dataset(path: str | Path) -> list[dict]:
    items = []
    with open(path, encoding="utf-8") as handle:
        for line in handle:
            line = line.strip()
            if line:
                items.append(json.loads(line))
    return items


_TARGET_BUILDERS = {"chain": chain_dag, "star": star_dag}


def build_utility(spec: dict, rng: np.random.Generator, evaluator: NodeEvaluator | None = None) -> UtilityFunction:
    """Construct a registry utility from a config dictionary."""
    spec = dict(spec)
    name = spec.pop("name", None)
    if name == "constant":
        utility = ConstantUtility(spec.pop("value", 0.0))
    elif name == "hidden_dag":
        n = int(spec.pop("n", 4))
        shape = spec.pop("target", "star")
        if shape not in _TARGET_BUILDERS:
            raise ValueError(f"unknown hidden_dag target: {shape!r}")
        utility = DagRecoveryUtility(_TARGET_BUILDERS[shape](n))
    elif name == "affine_target":
        n = int(spec.pop("n", 4))
        shape = spec.pop("target", "chain")
        if shape not in _TARGET_BUILDERS:
            raise ValueError(f"unknown affine_target target: {shape!r}")
        utility = make_affine_task(
            rng,
            n=n,
            dim=int(spec.pop("dim", 2)),
            points=int(spec.pop("points", 4)),
            scale=float(spec.pop("scale", 0.9)),
            structure=_TARGET_BUILDERS[shape](n),
        )
    elif name == "dataset":
        if evaluator is None:
            raise ValueError("dataset utility needs a node evaluator (remote endpoint)")
        utility = DatasetUtility(load_dataset(spec.pop("path")), evaluator)
    else:
        raise ValueError(f"unknown utility: {name!r}")
    if spec:
        raise ValueError(f"unknown utility option: {sorted(spec)[0]!r}")
    return utility
