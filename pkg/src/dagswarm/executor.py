"""Execution of an instantiated system: DAG plus expert assignment.

Nodes run in topological order; each node sees the task input plus the
outputs of its predecessors and produces one message. The end node's
message is the system output. Payloads are real vectors in synthetic mode
and text in remote mode, homogeneous within one execution.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .graph import DagStructure

ROLE_ENTRY = "entry"
ROLE_MIDDLE = "middle"
ROLE_END = "end"


@dataclass
class Message:
    payload: np.ndarray | str
    origin: int = -1


@dataclass(frozen=True)
class Assignment:
    """Slot k holds the pool index of the expert occupying graph position k."""

    slots: tuple[int, ...]

    def __post_init__(self):
        if any(s < 0 for s in self.slots):
            raise ValueError("expert indices must be >= 0")

    @classmethod
    def identity(cls, n: int) -> "Assignment":
        return cls(tuple(range(n)))

    def __len__(self) -> int:
        return len(self.slots)


class NodeEvaluator:
    """Maps (role, expert parameters or handle, inputs, task input, node) to a message.

    Subclasses count their own invocations in ``calls`` so optimization
    budgets can be audited.
    """

    def __init__(self):
        self.calls = 0

    def __call__(self, role, params, inputs, task_input, node) -> Message:
        self.calls += 1
        return self.evaluate(role, params, inputs, task_input, node)

    def evaluate(self, role, params, inputs, task_input, node) -> Message:
        raise NotImplementedError


class AffineEvaluator(NodeEvaluator):
    """Synthetic expert: output = W @ mean(task and inputs) + b.

    Expert parameters pack a d x d matrix row-major followed by a length-d
    bias. Deterministic; the role is ignored.
    """

    def evaluate(self, role, params, inputs, task_input, node) -> Message:
        x = np.asarray(task_input.payload, dtype=float)
        d = x.shape[0]
        params = np.asarray(params, dtype=float)
        if params.shape != (d * d + d,):
            raise ValueError(f"expected {d * d + d} parameters for dimension {d}, got {params.shape}")
        stacked = [x] + [np.asarray(m.payload, dtype=float) for m in inputs]
        mean = np.mean(stacked, axis=0)
        W = params[: d * d].reshape(d, d)
        b = params[d * d :]
        return Message(W @ mean + b, origin=node)


class ExecutionError(RuntimeError):
    def __init__(self, node: int, cause: Exception):
        super().__init__(f"evaluator failed at node {node}: {cause}")
        self.node = node
        self.cause = cause


def node_role(dag: DagStructure, node: int, in_degree: int) -> str:
    # A single-node graph is both entry and end; the end role wins because
    # its prompt asks for the final answer.
    if node == dag.end_node:
        return ROLE_END
    return ROLE_ENTRY if in_degree == 0 else ROLE_MIDDLE


def execute(
    dag: DagStructure,
    assignment: Assignment,
    pool,
    task_input: Message,
    evaluator: NodeEvaluator,
) -> Message:
    """Run every node once in topological order; return the end node's message."""
    if len(assignment) != dag.n:
        raise ValueError("assignment length must equal node count")
    if len(pool) == 0:
        raise ValueError("expert pool is empty")
    if any(s >= len(pool) for s in assignment.slots):
        raise ValueError("assignment references an expert outside the pool")

    predecessors: dict[int, list[int]] = {v: [] for v in dag.topo_order}
    for u, v in dag.edges:
        predecessors[v].append(u)
    position = {node: k for k, node in enumerate(dag.topo_order)}

    outputs: dict[int, Message] = {}
    for v in dag.topo_order:
        preds = sorted(predecessors[v], key=position.get)
        inputs = [outputs[u] for u in preds]
        role = node_role(dag, v, len(preds))
        try:
            outputs[v] = evaluator(role, pool[assignment.slots[v]], inputs, task_input, v)
        except Exception as exc:  # noqa: BLE001 - annotate with the failing node
            raise ExecutionError(v, exc) from exc
    return outputs[dag.end_node]
