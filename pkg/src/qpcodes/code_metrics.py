"""Exact minimum distance, covering radius and perfect/quasi-perfect labels."""

from __future__ import annotations

import math
import re
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from .product_graph import CYCLE, EXPLICIT, PATH, ProductGraph, Vertex, as_graph

INFINITE = math.inf

PERFECT = "perfect"
QUASI_PERFECT = "quasi_perfect"
NEITHER = "neither"

# distance-map entries are summed in int32; the sweep block is sized so one
# block of partial sums stays around 16 MB
_SWEEP_CELLS = 1 << 22


class EmptyCodeError(ValueError):
    pass


@dataclass(frozen=True)
class Code:
    """A set of codewords of one product graph, held in lexicographic order."""

    graph: ProductGraph
    codewords: tuple[Vertex, ...]

    def __init__(self, graph: ProductGraph | str, codewords: Iterable[Sequence[int]]):
        graph = as_graph(graph)
        words = [graph.check(c) for c in codewords]
        unique = sorted(set(words))
        if len(unique) != len(words):
            dupes = sorted({w for w in words if words.count(w) > 1})
            raise ValueError(f"duplicate codewords: {dupes}")
        object.__setattr__(self, "graph", graph)
        object.__setattr__(self, "codewords", tuple(unique))

    def __len__(self) -> int:
        return len(self.codewords)

    def __iter__(self):
        return iter(self.codewords)

    def __contains__(self, v: object) -> bool:
        return tuple(v) in set(self.codewords)  # type: ignore[arg-type]

    @property
    def array(self) -> np.ndarray:
        return np.array(self.codewords, dtype=np.int64).reshape(len(self), self.graph.ndim)

    def layer(self, level: int, axis: int = -1) -> "Code":
        """Codewords at ``level`` along ``axis``, projected onto the other factors."""
        axis %= self.graph.ndim
        rest = ProductGraph(self.graph.factors[:axis] + self.graph.factors[axis + 1 :])
        return Code(rest, (c[:axis] + c[axis + 1 :] for c in self if c[axis] == level))


@dataclass(frozen=True)
class Label:
    kind: str
    e: int | None = None

    def __str__(self) -> str:
        return NEITHER if self.kind == NEITHER else f"{self.kind}({self.e})"

    @classmethod
    def parse(cls, text: str) -> "Label":
        text = text.strip()
        if text == NEITHER:
            return cls(NEITHER)
        m = re.fullmatch(r"(perfect|quasi_perfect)\((\d+)\)", text)
        if not m:
            raise ValueError(f"bad label {text!r}")
        return cls(m.group(1), int(m.group(2)))


def label_for(min_distance: float, radius: int) -> Label:
    """Largest consistent label; perfect wins over quasi-perfect."""
    if min_distance >= 2 * radius + 1:
        return Label(PERFECT, radius)
    if radius >= 1 and min_distance >= 2 * radius - 1:
        return Label(QUASI_PERFECT, radius - 1)
    return Label(NEITHER)


@dataclass(frozen=True)
class CodeReport:
    min_distance: float
    covering_radius: int
    label: Label
    closest_pair: tuple[Vertex, Vertex] | None
    farthest_vertex: Vertex
    histogram: tuple[int, ...]

    def to_dict(self) -> dict:
        md = self.min_distance
        return {
            "min_distance": "inf" if md == INFINITE else int(md),
            "covering_radius": self.covering_radius,
            "label": str(self.label),
            "closest_pair": None if self.closest_pair is None else [list(v) for v in self.closest_pair],
            "farthest_vertex": list(self.farthest_vertex),
            "histogram": list(self.histogram),
        }


class Verdict(NamedTuple):
    holds: bool
    report: CodeReport


class PackingCensus(NamedTuple):
    sum_ball_sizes: int
    vertex_count: int
    overlap_count: int


def _require_nonempty(code: Code) -> None:
    if len(code) == 0:
        raise EmptyCodeError("operation needs at least one codeword")


def _pair_distances(graph: ProductGraph, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    out = np.zeros((len(a), len(b)), dtype=np.int64)
    for axis, f in enumerate(graph.factors):
        out += f.distance_table[np.ix_(a[:, axis], b[:, axis])]
    return out


def closest_pair(code: Code) -> tuple[float, tuple[Vertex, Vertex] | None]:
    """Minimum distance and the lexicographically first pair attaining it."""
    _require_nonempty(code)
    m = len(code)
    if m == 1:
        return INFINITE, None
    arr = code.array
    rows = max(1, _SWEEP_CELLS // m)
    best, where = None, None
    for start in range(0, m - 1, rows):
        block = _pair_distances(code.graph, arr[start : start + rows], arr)
        i_idx = np.arange(start, start + len(block))[:, None]
        block = np.where(np.arange(m)[None, :] > i_idx, block, np.iinfo(np.int64).max)
        flat = int(np.argmin(block))
        value = int(block.flat[flat])
        if best is None or value < best:
            i, j = divmod(flat, m)
            best, where = value, (start + i, j)
    assert where is not None
    return best, (code.codewords[where[0]], code.codewords[where[1]])


def min_pairwise_distance(code: Code) -> float:
    return closest_pair(code)[0]


def distance_to_code(v: Sequence[int], code: Code) -> int:
    _require_nonempty(code)
    v = code.graph.check(v)
    arr = code.array
    total = np.zeros(len(code), dtype=np.int64)
    for axis, f in enumerate(code.graph.factors):
        total += f.distance_table[v[axis], arr[:, axis]]
    return int(total.min())


def _sweep_block(graph: ProductGraph, block: np.ndarray) -> np.ndarray:
    acc = np.zeros((len(block),) + (1,) * graph.ndim, dtype=np.int32)
    for axis, f in enumerate(graph.factors):
        shape = [len(block)] + [1] * graph.ndim
        shape[axis + 1] = f.order
        acc = acc + f.distance_table[block[:, axis]].astype(np.int32).reshape(shape)
    return acc.min(axis=0)


def sweep_distances(code: Code, workers: int = 1) -> np.ndarray:
    """Distance to the code of every vertex, as the min over codewords of summed factor tables.

    The codeword list is cut into blocks; with ``workers > 1`` blocks run on a
    thread pool.  The min-reduction makes the result independent of the split.
    """
    _require_nonempty(code)
    g = code.graph
    arr = code.array
    rows = max(1, _SWEEP_CELLS // max(g.size, 1))
    blocks = [arr[s : s + rows] for s in range(0, len(arr), rows)]
    if workers > 1 and len(blocks) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda b: _sweep_block(g, b), blocks))
    else:
        parts = [_sweep_block(g, b) for b in blocks]
    return np.minimum.reduce(parts).astype(np.int64)


def _step(frontier: np.ndarray, axis: int, factor) -> np.ndarray:
    """Vertices adjacent to ``frontier`` along one factor."""
    n = factor.order
    out = np.zeros_like(frontier)
    if n == 1:
        return out
    if factor.kind == CYCLE:
        out |= np.roll(frontier, 1, axis=axis)
        if n > 2:
            out |= np.roll(frontier, -1, axis=axis)
        return out
    if factor.kind == PATH:
        lo = [slice(None)] * frontier.ndim
        hi = [slice(None)] * frontier.ndim
        lo[axis], hi[axis] = slice(0, n - 1), slice(1, n)
        out[tuple(hi)] |= frontier[tuple(lo)]
        out[tuple(lo)] |= frontier[tuple(hi)]
        return out
    assert factor.kind == EXPLICIT
    adj = np.zeros((n, n), dtype=np.int64)
    for a, b in factor.edges:
        adj[a, b] = adj[b, a] = 1
    moved = np.moveaxis(frontier, axis, 0).reshape(n, -1).astype(np.int64)
    reached = (adj @ moved > 0).reshape(np.moveaxis(frontier, axis, 0).shape)
    return np.moveaxis(reached, 0, axis)


def frontier_distances(code: Code) -> np.ndarray:
    """Distance to the code of every vertex by multi-source breadth-first expansion."""
    _require_nonempty(code)
    g = code.graph
    dist = np.full(g.shape, -1, dtype=np.int64)
    frontier = np.zeros(g.shape, dtype=bool)
    frontier[tuple(code.array.T)] = True
    dist[frontier] = 0
    level = 0
    while frontier.any():
        level += 1
        reached = np.zeros_like(frontier)
        for axis, f in enumerate(g.factors):
            reached |= _step(frontier, axis, f)
        frontier = reached & (dist < 0)
        dist[frontier] = level
    return dist


_STRATEGIES = {"sweep": sweep_distances, "frontier": frontier_distances}


def distance_map(code: Code, method: str = "sweep") -> np.ndarray:
    try:
        strategy = _STRATEGIES[method]
    except KeyError:
        raise ValueError(f"unknown method {method!r}; choose from {sorted(_STRATEGIES)}") from None
    return strategy(code)


def covering_radius(code: Code, method: str = "sweep") -> int:
    return int(distance_map(code, method).max())


def distance_histogram(code: Code, method: str = "sweep") -> tuple[int, ...]:
    return tuple(int(c) for c in np.bincount(distance_map(code, method).ravel()))


def classify(code: Code, method: str = "sweep") -> CodeReport:
    dist = distance_map(code, method)
    radius = int(dist.max())
    far = code.graph.vertex(int(np.argmax(dist.ravel())))
    md, pair = closest_pair(code)
    return CodeReport(
        min_distance=md,
        covering_radius=radius,
        label=label_for(md, radius),
        closest_pair=pair,
        farthest_vertex=far,
        histogram=tuple(int(c) for c in np.bincount(dist.ravel())),
    )


def check_claim(code: Code, kind: str, e: int) -> Verdict:
    if kind not in (PERFECT, QUASI_PERFECT):
        raise ValueError(f"claim kind must be {PERFECT!r} or {QUASI_PERFECT!r}, got {kind!r}")
    report = classify(code)
    return Verdict(report.label == Label(kind, e), report)


def ball_size(graph: ProductGraph | str, x: Sequence[int], r: int) -> int:
    """|B_r(x)| from per-factor sphere counts, without listing the ball."""
    graph = as_graph(graph)
    x = graph.check(x)
    counts = np.ones(1, dtype=np.int64)
    for f, a in zip(graph.factors, x):
        counts = np.convolve(counts, np.bincount(f.distance_table[a]))
    return int(counts[: max(r, -1) + 1].sum())


def sphere_packing_census(code: Code, e: int) -> PackingCensus:
    _require_nonempty(code)
    g = code.graph
    total = sum(ball_size(g, c, e) for c in code)
    covered = int((sweep_distances(code) <= e).sum())
    return PackingCensus(total, g.size, total - covered)
