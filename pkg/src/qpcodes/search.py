"""Exhaustive backtracking search for perfect and quasi-perfect codes.

Codewords are chosen in increasing lexicographic index, so the first complete
code reached is the lexicographically smallest one of its size.  The search
keeps one array with the distance from every vertex to the chosen set; it
serves both the separation test for new codewords and the coverage bound.
"""

from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .code_metrics import PERFECT, QUASI_PERFECT, Code, check_claim
from .product_graph import ProductGraph, Vertex, as_graph

log = logging.getLogger(__name__)

FOUND = "found"
NONE = "none"
INCONCLUSIVE = "inconclusive"

DEFAULT_SEARCH_CAP = 4096


class SearchInconclusive(RuntimeError):
    """The node budget ran out before the question was settled."""


@dataclass(frozen=True)
class SearchSpec:
    graph: ProductGraph
    kind: str
    e: int
    size_min: int = 1
    size_max: int | None = None
    exhaustive: bool = True
    symmetry_break: bool = False
    node_budget: int | None = None
    cap: int = DEFAULT_SEARCH_CAP

    def __post_init__(self) -> None:
        object.__setattr__(self, "graph", as_graph(self.graph))
        if self.kind not in (PERFECT, QUASI_PERFECT):
            raise ValueError(f"kind must be {PERFECT!r} or {QUASI_PERFECT!r}, got {self.kind!r}")
        if self.e < 0:
            raise ValueError("e must be >= 0")
        if self.size_max is None:
            object.__setattr__(self, "size_max", self.graph.size)
        if not 1 <= self.size_min <= self.size_max <= self.graph.size:
            raise ValueError(
                f"need 1 <= size_min <= size_max <= {self.graph.size}, got {self.size_min}..{self.size_max}"
            )
        if self.node_budget is not None and self.node_budget < 1:
            raise ValueError("node_budget must be positive")
        if self.graph.size > self.cap:
            raise ValueError(f"{self.graph.spec} has {self.graph.size} vertices, above the search cap {self.cap}")

    @property
    def uses_symmetry(self) -> bool:
        return self.symmetry_break and self.graph.all_cycles

    def certificate(self) -> dict[str, Any]:
        return {
            "graph": self.graph.spec,
            "kind": self.kind,
            "e": self.e,
            "size_min": self.size_min,
            "size_max": self.size_max,
            "exhaustive": self.exhaustive,
            "symmetry_break": self.symmetry_break,
            "symmetry_applied": self.uses_symmetry,
            "node_budget": self.node_budget,
        }


@dataclass(frozen=True)
class SearchOutcome:
    status: str
    witness: Code | None
    nodes_explored: int
    certificate: dict[str, Any] = field(default_factory=dict)

    @property
    def size(self) -> int | None:
        return None if self.witness is None else len(self.witness)


class _BudgetExhausted(Exception):
    pass


class _Problem:
    """Read-only data shared by every branch of one search."""

    def __init__(self, graph: ProductGraph, kind: str, e: int):
        self.graph = graph
        self.kind = kind
        self.e = e
        self.reach = e if kind == PERFECT else e + 1
        self.separation = 2 * e + 1
        self.dist = graph.distance_matrix()
        self.ball = (self.dist <= self.reach).sum(axis=1)
        self.n = graph.size

    def accepts(self, chosen: list[int]) -> bool:
        code = Code(self.graph, (self.graph.vertex(i) for i in chosen))
        return check_claim(code, self.kind, self.e).holds


class _Branch:
    """Depth-first search under a fixed first codeword."""

    def __init__(self, problem: _Problem, size: int, budget: int | None):
        self.p = problem
        self.size = size
        self.budget = budget
        self.nodes = 0

    def run(self, first: int) -> list[int] | None:
        big = np.iinfo(np.int32).max
        cover = np.full(self.p.n, big, dtype=np.int32)
        return self._visit([first], np.minimum(cover, self.p.dist[first]))

    def _visit(self, chosen: list[int], cover: np.ndarray) -> list[int] | None:
        self.nodes += 1
        if self.budget is not None and self.nodes > self.budget:
            raise _BudgetExhausted
        p = self.p
        uncovered = np.flatnonzero(cover > p.reach)
        if len(chosen) == self.size:
            if len(uncovered) == 0 and p.accepts(chosen):
                return list(chosen)
            return None
        remaining = self.size - len(chosen)
        last = chosen[-1]
        cands = np.flatnonzero(cover[last + 1 :] >= p.separation) + last + 1
        if len(cands) < remaining:
            return None
        if len(uncovered):
            if len(uncovered) > remaining * int(p.ball[cands].max()):
                return None
            if not (p.dist[cands, uncovered[0]] <= p.reach).any():
                return None
        for c in cands.tolist():
            found = self._visit(chosen + [c], np.minimum(cover, p.dist[c]))
            if found is not None:
                return found
        return None


def _run_branch(problem: _Problem, size: int, first: int, budget: int | None) -> tuple[list[int] | None, int, bool]:
    branch = _Branch(problem, size, budget)
    try:
        found = branch.run(first)
    except _BudgetExhausted:
        return None, branch.nodes, True
    return found, branch.nodes, False


_worker_problem: _Problem | None = None


def _init_worker(problem: _Problem) -> None:
    global _worker_problem
    _worker_problem = problem


def _run_branch_in_worker(size: int, first: int, budget: int | None):
    assert _worker_problem is not None
    return _run_branch(_worker_problem, size, first, budget)


def _first_codewords(problem: _Problem, spec: SearchSpec) -> list[int]:
    return [0] if spec.uses_symmetry else list(range(problem.n))


def _serial_size(problem, firsts, size, remaining):
    """One code size, branches in first-codeword order; returns (witness, nodes, budget_hit)."""
    spent = 0
    for first in firsts:
        budget = None if remaining is None else remaining - spent
        found, nodes, hit = _run_branch(problem, size, first, budget)
        if hit:
            return None, remaining, True
        spent += nodes
        if found is not None:
            return found, spent, False
    return None, spent, False


def _parallel_size(pool, firsts, size, remaining):
    """Same contract as :func:`_serial_size`.

    Every branch runs with the whole remaining budget; the in-order reduction
    then charges branches exactly as the serial loop would, so witness, node
    count and status do not depend on the number of workers.
    """
    futures = [pool.submit(_run_branch_in_worker, size, f, remaining) for f in firsts]
    spent = 0
    try:
        for fut in futures:
            found, nodes, hit = fut.result()
            if remaining is not None and (hit or spent + nodes > remaining):
                return None, remaining, True
            spent += nodes
            if found is not None:
                return found, spent, False
        return None, spent, False
    finally:
        for fut in futures:
            fut.cancel()


def search_code(spec: SearchSpec, workers: int = 1) -> SearchOutcome:
    """Find a code of the requested kind, trying sizes from ``size_min`` upwards."""
    problem = _Problem(spec.graph, spec.kind, spec.e)
    firsts = _first_codewords(problem, spec)
    pool = None
    if workers > 1 and len(firsts) > 1:
        pool = ProcessPoolExecutor(max_workers=workers, initializer=_init_worker, initargs=(problem,))
    used = 0
    try:
        for size in range(spec.size_min, spec.size_max + 1):
            remaining = None if spec.node_budget is None else spec.node_budget - used
            if pool is None:
                found, nodes, hit = _serial_size(problem, firsts, size, remaining)
            else:
                found, nodes, hit = _parallel_size(pool, firsts, size, remaining)
            used += nodes
            log.debug("size %d: %d nodes", size, nodes)
            if hit:
                return SearchOutcome(INCONCLUSIVE, None, used, spec.certificate())
            if found is not None:
                witness = Code(spec.graph, (spec.graph.vertex(i) for i in found))
                return SearchOutcome(FOUND, witness, used, spec.certificate())
    finally:
        if pool is not None:
            pool.shutdown(cancel_futures=True)
    status = NONE if spec.exhaustive else INCONCLUSIVE
    return SearchOutcome(status, None, used, spec.certificate())


def min_code_size(
    graph: ProductGraph | str,
    kind: str,
    e: int,
    node_budget: int | None = None,
    symmetry_break: bool = False,
    workers: int = 1,
) -> int | None:
    """Smallest size admitting a code of the given kind, or ``None`` if no size does.

    Raises :class:`SearchInconclusive` when the budget runs out first.
    """
    spec = SearchSpec(as_graph(graph), kind, e, node_budget=node_budget, symmetry_break=symmetry_break)
    outcome = search_code(spec, workers=workers)
    if outcome.status == INCONCLUSIVE:
        raise SearchInconclusive(f"budget of {node_budget} nodes exhausted after {outcome.nodes_explored}")
    return outcome.size


def witness_vertices(outcome: SearchOutcome) -> list[Vertex]:
    return [] if outcome.witness is None else list(outcome.witness.codewords)
