"""Reachability certificates for compartment graphs.

Graphs are given as a vertex count ``n`` (vertices ``1..n``) and an iterable
of directed edges ``(source, target)``.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Iterable

from .model import CompartmentModel, LinearModel


class InvariantViolation(AssertionError):
    """An internal consistency check failed."""


class UnreachableVertexError(ValueError):
    def __init__(self, vertex: int):
        super().__init__(f"vertex {vertex} reaches no source")
        self.vertex = vertex


def _adjacency(n: int, edges: Iterable[tuple[int, int]], reverse=False) -> dict[int, list[int]]:
    adj = {v: [] for v in range(1, n + 1)}
    for i, j in edges:
        if reverse:
            adj[j].append(i)
        else:
            adj[i].append(j)
    for v in adj:
        adj[v].sort()
    return adj


def _closure(adj: dict[int, list[int]], starts: Iterable[int]) -> set[int]:
    seen = set(starts)
    queue = deque(sorted(seen))
    while queue:
        v = queue.popleft()
        for w in adj[v]:
            if w not in seen:
                seen.add(w)
                queue.append(w)
    return seen


def reachable(n: int, edges: Iterable[tuple[int, int]], start: int, targets: Iterable[int]) -> bool:
    """True when some target can be reached from ``start`` (a vertex reaches itself)."""
    if not 1 <= start <= n:
        raise ValueError(f"vertex {start} outside 1..{n}")
    return bool(_closure(_adjacency(n, edges), [start]) & set(targets))


def strongly_connected(n: int, edges: Iterable[tuple[int, int]]) -> bool:
    edges = list(edges)
    everything = set(range(1, n + 1))
    return (_closure(_adjacency(n, edges), [1]) == everything
            and _closure(_adjacency(n, edges, reverse=True), [1]) == everything)


@dataclass(frozen=True)
class ConditionReport:
    """Which applicability conditions a model meets.

    Graph flags are ``None`` for models that are not compartment models.
    """

    single_output: bool
    leak_or_input_reachable_from_all: bool | None
    strongly_connected: bool | None
    has_input: bool | None

    @property
    def certificates(self) -> tuple[str, ...]:
        out = []
        if self.single_output:
            out.append("Thm1")
        if self.leak_or_input_reachable_from_all:
            out.append("Thm2")
        if self.strongly_connected and self.has_input:
            out.append("Thm3")
        return tuple(out)

    @property
    def certificate(self) -> str:
        return "+".join(self.certificates) or "None"

    @property
    def elimination_gate(self) -> bool:
        """Coefficients of a full set of IO equations generate the identifiable field."""
        return bool(self.single_output or self.leak_or_input_reachable_from_all)

    @property
    def cramer_gate(self) -> bool:
        """Cramer-rule (and transfer-function) coefficients generate the identifiable field."""
        return bool(self.strongly_connected and self.has_input)

    def as_dict(self) -> dict:
        return {
            "single_output": self.single_output,
            "leak_or_input_reachable_from_all": self.leak_or_input_reachable_from_all,
            "strongly_connected": self.strongly_connected,
            "has_input": self.has_input,
            "certificates": list(self.certificates),
        }


def condition_report(model: CompartmentModel | LinearModel) -> ConditionReport:
    if isinstance(model, LinearModel):
        return ConditionReport(model.m == 1, None, None, None)
    edges = list(model.edge_set)
    sinks = model.leak_set | model.input_set
    back = _closure(_adjacency(model.n, edges, reverse=True), sinks)
    all_reach = len(back) == model.n
    sc = strongly_connected(model.n, edges)
    has_input = bool(model.inputs)
    report = ConditionReport(len(model.outputs) == 1, all_reach, sc, has_input)
    if report.cramer_gate and not all_reach:
        raise InvariantViolation("strongly connected graph with an input must reach an input from every vertex")
    return report


def bfs_spanning_forest(n: int, edges: Iterable[tuple[int, int]], sources: Iterable[int]):
    """Breadth-first forest in which every vertex has a unique path to a source.

    Returns ``(forest_edges, relabel)`` where ``relabel`` maps old vertex
    labels to new ones.  Every forest edge ``i -> j`` satisfies
    ``relabel[j] < relabel[i]``, so the compartment matrix of the forest is
    upper triangular after relabeling.
    """
    sources = sorted(set(sources))
    radj = _adjacency(n, edges, reverse=True)
    order = list(sources)
    seen = set(sources)
    forest = []
    queue = deque(sources)
    while queue:
        v = queue.popleft()
        for w in radj[v]:
            if w not in seen:
                seen.add(w)
                forest.append((w, v))
                order.append(w)
                queue.append(w)
    missing = [v for v in range(1, n + 1) if v not in seen]
    if missing:
        raise UnreachableVertexError(missing[0])
    relabel = {v: k for k, v in enumerate(order, start=1)}
    return forest, relabel
