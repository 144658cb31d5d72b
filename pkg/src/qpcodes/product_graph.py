"""Implicit Cartesian products of paths, cycles and small explicit graphs.

A product graph is never materialised: vertices are coordinate tuples and the
graph metric is the sum of the per-factor metrics.  Coordinates are 0-based.
"""

from __future__ import annotations

import itertools
import json
import os
import re
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Iterator, Sequence

import numpy as np

Vertex = tuple[int, ...]

PATH = "path"
CYCLE = "cycle"
EXPLICIT = "explicit"

DEFAULT_EXPAND_CAP = 100_000


class GraphSpecError(ValueError):
    """Malformed graph spec string or explicit graph file."""


class VertexError(ValueError):
    """A vertex or offset does not fit the graph it is used with."""


@dataclass(frozen=True)
class FactorSpec:
    """One factor of a Cartesian product.

    ``kind`` is ``"path"``, ``"cycle"`` or ``"explicit"``.  A cycle of order 1
    is a single vertex and a cycle of order 2 is a single edge.  Explicit
    factors carry their edge set as sorted pairs and must be simple and
    connected; ``name`` is the token used when the factor is written back into
    a spec string.
    """

    kind: str
    order: int
    edges: frozenset[tuple[int, int]] = field(default=frozenset(), compare=True)
    name: str | None = field(default=None, compare=False)

    def __post_init__(self) -> None:
        if self.kind not in (PATH, CYCLE, EXPLICIT):
            raise GraphSpecError(f"unknown factor kind {self.kind!r}")
        if isinstance(self.order, bool) or not isinstance(self.order, (int, np.integer)):
            raise GraphSpecError(f"factor order must be an integer, got {self.order!r}")
        if self.order < 1:
            raise GraphSpecError(f"factor order must be >= 1, got {self.order}")
        object.__setattr__(self, "order", int(self.order))
        if self.kind != EXPLICIT:
            if self.edges:
                raise GraphSpecError("only explicit factors carry an edge list")
            return
        object.__setattr__(self, "edges", _normalise_edges(self.edges, self.order))
        if not _is_connected(self.order, self.adjacency):
            raise GraphSpecError(f"explicit graph {self.token} is disconnected")

    @classmethod
    def path(cls, order: int) -> "FactorSpec":
        return cls(PATH, order)

    @classmethod
    def cycle(cls, order: int) -> "FactorSpec":
        return cls(CYCLE, order)

    @classmethod
    def explicit(cls, order: int, edges: Iterable[Sequence[int]], name: str | None = None) -> "FactorSpec":
        return cls(EXPLICIT, order, frozenset(tuple(e) for e in edges), name)

    @property
    def token(self) -> str:
        if self.kind == PATH:
            return f"P{self.order}"
        if self.kind == CYCLE:
            return f"C{self.order}"
        return "@" + (self.name or f"<explicit:{self.order}>")

    @cached_property
    def adjacency(self) -> tuple[tuple[int, ...], ...]:
        n = self.order
        if self.kind == PATH:
            return tuple(tuple(b for b in (a - 1, a + 1) if 0 <= b < n) for a in range(n))
        if self.kind == CYCLE:
            if n == 1:
                return ((),)
            if n == 2:
                return ((1,), (0,))
            return tuple(tuple(sorted({(a - 1) % n, (a + 1) % n})) for a in range(n))
        nbrs: list[list[int]] = [[] for _ in range(n)]
        for a, b in sorted(self.edges):
            nbrs[a].append(b)
            nbrs[b].append(a)
        return tuple(tuple(sorted(x)) for x in nbrs)

    @cached_property
    def distance_table(self) -> np.ndarray:
        """All-pairs distance matrix (read-only)."""
        n = self.order
        if self.kind == EXPLICIT:
            table = np.array([_bfs(self.adjacency, s) for s in range(n)], dtype=np.int64)
        else:
            idx = np.arange(n)
            table = np.abs(idx[:, None] - idx[None, :])
            if self.kind == CYCLE:
                table = np.minimum(table, n - table)
        table.setflags(write=False)
        return table

    @cached_property
    def diameter(self) -> int:
        if self.kind == PATH:
            return self.order - 1
        if self.kind == CYCLE:
            return self.order // 2
        return int(self.distance_table.max())

    def check(self, a: int) -> int:
        if isinstance(a, bool) or not isinstance(a, (int, np.integer)):
            raise VertexError(f"coordinate must be an integer, got {a!r}")
        if not 0 <= a < self.order:
            raise VertexError(f"coordinate {a} out of range for {self.token}")
        return int(a)

    def distance(self, a: int, b: int) -> int:
        a, b = self.check(a), self.check(b)
        if self.kind == PATH:
            return abs(a - b)
        if self.kind == CYCLE:
            d = abs(a - b)
            return min(d, self.order - d)
        return int(self.distance_table[a, b])

    def sphere_coords(self, a: int, r: int) -> tuple[int, ...]:
        """Coordinates at distance exactly ``r`` from ``a`` within this factor."""
        if r < 0:
            return ()
        if self.kind == EXPLICIT:
            return tuple(int(b) for b in np.flatnonzero(self.distance_table[a] == r))
        if self.kind == PATH:
            return tuple(sorted({b for b in (a - r, a + r) if 0 <= b < self.order}))
        if r > self.order // 2:
            return ()
        return tuple(sorted({(a - r) % self.order, (a + r) % self.order}))

    def eccentricity(self, a: int) -> int:
        if self.kind == PATH:
            return max(a, self.order - 1 - a)
        if self.kind == CYCLE:
            return self.order // 2
        return int(self.distance_table[a].max())


def _normalise_edges(edges: Iterable[Sequence[int]], n: int) -> frozenset[tuple[int, int]]:
    seen: set[tuple[int, int]] = set()
    for edge in edges:
        if len(edge) != 2:
            raise GraphSpecError(f"edge {edge!r} is not a pair")
        a, b = (int(x) for x in edge)
        if a == b:
            raise GraphSpecError(f"loop at vertex {a}")
        if not (0 <= a < n and 0 <= b < n):
            raise GraphSpecError(f"edge {edge!r} out of range for n={n}")
        key = (min(a, b), max(a, b))
        if key in seen:
            raise GraphSpecError(f"parallel edge {key}")
        seen.add(key)
    return frozenset(seen)


def _bfs(adjacency: Sequence[Sequence[int]], source: int) -> list[int]:
    dist = [-1] * len(adjacency)
    dist[source] = 0
    queue = deque([source])
    while queue:
        a = queue.popleft()
        for b in adjacency[a]:
            if dist[b] < 0:
                dist[b] = dist[a] + 1
                queue.append(b)
    return dist


def _is_connected(n: int, adjacency: Sequence[Sequence[int]]) -> bool:
    return min(_bfs(adjacency, 0)) >= 0 if n else True


@dataclass(frozen=True)
class ProductGraph:
    """Ordered Cartesian product of factors, evaluated implicitly."""

    factors: tuple[FactorSpec, ...]

    def __post_init__(self) -> None:
        factors = tuple(self.factors)
        if not factors:
            raise GraphSpecError("a product graph needs at least one factor")
        if not all(isinstance(f, FactorSpec) for f in factors):
            raise TypeError("factors must be FactorSpec instances")
        object.__setattr__(self, "factors", factors)

    def __str__(self) -> str:
        return self.spec

    @property
    def spec(self) -> str:
        return "x".join(f.token for f in self.factors)

    @property
    def ndim(self) -> int:
        return len(self.factors)

    @cached_property
    def shape(self) -> tuple[int, ...]:
        return tuple(f.order for f in self.factors)

    @cached_property
    def size(self) -> int:
        return int(np.prod(self.shape, dtype=object))

    @cached_property
    def diameter(self) -> int:
        return sum(f.diameter for f in self.factors)

    @property
    def all_cycles(self) -> bool:
        return all(f.kind == CYCLE for f in self.factors)

    def extend(self, factor: FactorSpec) -> "ProductGraph":
        return ProductGraph(self.factors + (factor,))

    def check(self, v: Sequence[int]) -> Vertex:
        """Validate ``v`` and return it as a plain tuple."""
        v = tuple(v)
        if len(v) != self.ndim:
            raise VertexError(f"vertex {v} has {len(v)} coordinates, {self.spec} needs {self.ndim}")
        return tuple(f.check(a) for f, a in zip(self.factors, v))

    def index(self, v: Sequence[int]) -> int:
        return int(np.ravel_multi_index(self.check(v), self.shape))

    def vertex(self, i: int) -> Vertex:
        return tuple(int(a) for a in np.unravel_index(i, self.shape))

    def vertices(self) -> Iterator[Vertex]:
        """All vertices in lexicographic order."""
        return itertools.product(*(range(n) for n in self.shape))

    def distance(self, u: Sequence[int], v: Sequence[int]) -> int:
        u, v = self.check(u), self.check(v)
        return sum(f.distance(a, b) for f, a, b in zip(self.factors, u, v))

    def sphere(self, x: Sequence[int], r: int) -> frozenset[Vertex]:
        """Vertices at distance exactly ``r`` from ``x``.

        Enumerated by splitting ``r`` across factors, so the cost depends on
        the output size rather than on the vertex count.
        """
        x = self.check(x)
        if r < 0 or r > self.diameter:
            return frozenset()
        caps = [f.eccentricity(a) for f, a in zip(self.factors, x)]
        out: set[Vertex] = set()
        for parts in _compositions(r, caps):
            choices = [f.sphere_coords(a, k) for f, a, k in zip(self.factors, x, parts)]
            out.update(itertools.product(*choices))
        return frozenset(out)

    def ball(self, x: Sequence[int], r: int) -> frozenset[Vertex]:
        x = self.check(x)
        out: set[Vertex] = set()
        for k in range(min(r, self.diameter) + 1):
            out |= self.sphere(x, k)
        return frozenset(out)

    def translate(self, offset: Sequence[int], vertices: Iterable[Sequence[int]]) -> frozenset[Vertex]:
        """Shift every vertex by ``offset``.

        Cycle coordinates wrap (negative offsets allowed).  Path coordinates
        must stay in range; explicit factors only accept a zero offset.
        """
        offset = tuple(int(o) for o in offset)
        if len(offset) != self.ndim:
            raise VertexError(f"offset {offset} has wrong length for {self.spec}")
        for f, o in zip(self.factors, offset):
            if f.kind == EXPLICIT and o != 0:
                raise VertexError(f"cannot translate along explicit factor {f.token}")
        out = set()
        for v in vertices:
            v = self.check(v)
            moved = []
            for f, a, o in zip(self.factors, v, offset):
                b = (a + o) % f.order if f.kind == CYCLE else a + o
                if not 0 <= b < f.order:
                    raise VertexError(f"translate of {v} by {offset} leaves {self.spec} (coordinate {b})")
                moved.append(b)
            out.add(tuple(moved))
        return frozenset(out)

    def coordinate_arrays(self) -> list[np.ndarray]:
        """Per-factor coordinate of every vertex, in lexicographic index order."""
        grids = np.indices(self.shape).reshape(self.ndim, -1)
        return list(grids)

    def distance_matrix(self) -> np.ndarray:
        """Full ``size x size`` distance matrix from the factor tables."""
        coords = self.coordinate_arrays()
        total = np.zeros((self.size, self.size), dtype=np.int32)
        for f, c in zip(self.factors, coords):
            total += f.distance_table[np.ix_(c, c)].astype(np.int32)
        return total


def _compositions(r: int, caps: Sequence[int]) -> Iterator[tuple[int, ...]]:
    """Ways to write ``r`` as an ordered sum with ``parts[i] <= caps[i]``."""
    if len(caps) == 1:
        if r <= caps[0]:
            yield (r,)
        return
    rest_cap = sum(caps[1:])
    for k in range(max(0, r - rest_cap), min(r, caps[0]) + 1):
        for tail in _compositions(r - k, caps[1:]):
            yield (k,) + tail


def factor_distance(f: FactorSpec, a: int, b: int) -> int:
    return f.distance(a, b)


def enumerate_vertices(g: ProductGraph) -> Iterator[Vertex]:
    return g.vertices()


def direct_sum(
    vertices: Iterable[Sequence[int]], levels: Iterable[int], factor: FactorSpec
) -> frozenset[Vertex]:
    """Pair every vertex with every level of an appended factor."""
    levels = sorted({factor.check(level) for level in levels})
    return frozenset(tuple(v) + (level,) for v in vertices for level in levels)


def explicit_expand(g: ProductGraph, cap: int = DEFAULT_EXPAND_CAP, name: str | None = None) -> FactorSpec:
    """Materialise ``g`` as an explicit graph; vertex ``i`` is lexicographic index ``i``."""
    if g.size > cap:
        raise ValueError(f"{g.spec} has {g.size} vertices, above the expansion cap {cap}")
    index = np.arange(g.size).reshape(g.shape)
    edges: set[tuple[int, int]] = set()
    for axis, f in enumerate(g.factors):
        for a, nbrs in enumerate(f.adjacency):
            for b in nbrs:
                if b <= a:
                    continue
                src = np.take(index, a, axis=axis).ravel()
                dst = np.take(index, b, axis=axis).ravel()
                edges.update(zip(src.tolist(), dst.tolist()))
    return FactorSpec.explicit(g.size, edges, name=name or f"expand({g.spec})")


_SIMPLE_FACTOR = re.compile(r"^([CP])(\d+)$")


def load_explicit_graph(path: str | os.PathLike) -> FactorSpec:
    """Read an explicit graph file: JSON with ``n`` and ``edges`` (0-based pairs)."""
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise GraphSpecError(f"cannot read explicit graph {path}: {exc}") from exc
    if not isinstance(data, dict) or "n" not in data or "edges" not in data:
        raise GraphSpecError(f"{path}: expected an object with 'n' and 'edges'")
    n = data["n"]
    if not isinstance(n, int) or isinstance(n, bool):
        raise GraphSpecError(f"{path}: 'n' must be an integer")
    factor = FactorSpec.explicit(n, data["edges"], name=str(path))
    factor.distance_table  # tables are built once, at parse time
    return factor


def parse_graph_spec(text: str) -> ProductGraph:
    """Parse ``"C3xC6xP2"``-style specs; ``@file`` pulls in an explicit graph."""
    text = text.strip()
    if not text:
        raise GraphSpecError("empty graph spec")
    pieces = text.split("x")
    factors: list[FactorSpec] = []
    i = 0
    while i < len(pieces):
        piece = pieces[i].strip()
        if piece.startswith("@"):
            # file names may themselves contain 'x'; take the shortest existing path
            j = i
            candidate = piece[1:]
            while not os.path.isfile(candidate) and j + 1 < len(pieces):
                j += 1
                candidate += "x" + pieces[j]
            if not os.path.isfile(candidate):
                raise GraphSpecError(f"explicit graph file not found in {piece!r}")
            factors.append(load_explicit_graph(candidate))
            i = j + 1
            continue
        m = _SIMPLE_FACTOR.match(piece)
        if not m:
            raise GraphSpecError(f"bad factor {piece!r} in {text!r}")
        order = int(m.group(2))
        if order < 1:
            raise GraphSpecError(f"factor {piece!r} has order 0")
        factors.append(FactorSpec(CYCLE if m.group(1) == "C" else PATH, order))
        i += 1
    return ProductGraph(tuple(factors))


def as_graph(graph: "ProductGraph | str") -> ProductGraph:
    return parse_graph_spec(graph) if isinstance(graph, str) else graph
