"""Generators for the layered, tiled, diagonal and mesh code constructions.

Each generator returns the code together with the claimed label and the
parameters that produced it.  Generators check the hypotheses placed on their
*inputs* but never certify their own output; that is left to
:func:`qpcodes.code_metrics.check_claim`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Callable, Iterable, Sequence

from .code_metrics import PERFECT, QUASI_PERFECT, Code, check_claim, classify
from .product_graph import CYCLE, PATH, FactorSpec, ProductGraph, Vertex, VertexError, direct_sum


class TheoremId(str, Enum):
    T3_1 = "T3_1"
    T3_2 = "T3_2"
    C3_3 = "C3_3"
    N3_4 = "N3_4"
    T3_5 = "T3_5"
    T3_6 = "T3_6"
    T3_7 = "T3_7"
    N4_1 = "N4_1"
    T4_2 = "T4_2"
    T4_3a = "T4_3a"
    T4_3b = "T4_3b"
    T4_3c = "T4_3c"
    T4_4a = "T4_4a"
    T4_4b = "T4_4b"
    T5_1a = "T5_1a"
    T5_1b = "T5_1b"
    TRIV_PN = "TRIV_PN"
    O5_2 = "O5_2"
    T5_3 = "T5_3"


class ConstructionError(ValueError):
    """Parameters outside the range a construction covers."""


class PreconditionError(ConstructionError):
    """An input code does not satisfy the construction's hypothesis."""


@dataclass(frozen=True)
class Claim:
    kind: str
    e: int

    def __str__(self) -> str:
        return f"{self.kind}({self.e})"


@dataclass(frozen=True)
class ConstructionResult:
    graph: ProductGraph
    code: Code
    claim: Claim
    theorem: TheoremId
    params: dict[str, Any] = field(default_factory=dict)
    notes: tuple[str, ...] = ()

    @property
    def provenance(self) -> dict[str, Any]:
        out: dict[str, Any] = {"theorem": self.theorem.value, "params": dict(self.params)}
        if self.notes:
            out["notes"] = list(self.notes)
        return out


def _result(theorem, factors, words, claim, params, notes=()) -> ConstructionResult:
    graph = ProductGraph(tuple(factors))
    return ConstructionResult(graph, Code(graph, words), claim, theorem, params, tuple(notes))


def _require_perfect(code: Code, e: int, what: str) -> None:
    verdict = check_claim(code, PERFECT, e)
    if not verdict.holds:
        raise PreconditionError(
            f"{what} must be a perfect {e}-code in {code.graph.spec}; classifier says {verdict.report.label}"
        )


def _require_kinds(graph: ProductGraph, kinds: Sequence[str], what: str) -> None:
    if tuple(f.kind for f in graph.factors) != tuple(kinds):
        raise PreconditionError(f"{what} must live in a product of {'/'.join(kinds)} factors, got {graph.spec}")


def _shift(graph: ProductGraph, offset: Sequence[int], words: Iterable[Vertex]) -> frozenset[Vertex]:
    try:
        return graph.translate(offset, words)
    except VertexError as exc:
        raise ConstructionError(str(exc)) from exc


def _stack(layers: Iterable[tuple[Iterable[Vertex], int]], level_factor: FactorSpec) -> set[Vertex]:
    words: set[Vertex] = set()
    for layer, level in layers:
        words |= direct_sum(layer, [level], level_factor)
    return words


def _positive(name: str, value: int) -> int:
    if isinstance(value, bool) or not isinstance(value, int) or value < 1:
        raise ConstructionError(f"{name} must be a positive integer, got {value!r}")
    return value


def build_t31(code: Code, e: int, k: int, ext: str = "path") -> ConstructionResult:
    """Stack a perfect ``e``-code of G at levels 1, 4, ..., 3k-2 of a path or cycle of order 3k."""
    _positive("e", e)
    _positive("k", k)
    if ext not in ("path", "cycle"):
        raise ConstructionError(f"ext must be 'path' or 'cycle', got {ext!r}")
    if e >= 2 and k != 1:
        raise ConstructionError("for e >= 2 only k = 1 is covered")
    _require_perfect(code, e, "D")
    level = FactorSpec(PATH if ext == "path" else CYCLE, 3 * k)
    words = _stack(((code.codewords, 3 * i + 1) for i in range(k)), level)
    return _result(
        TheoremId.T3_1,
        code.graph.factors + (level,),
        words,
        Claim(QUASI_PERFECT, e),
        {"base_graph": code.graph.spec, "e": e, "k": k, "ext": ext},
    )


def _two_layer_period6(code: Code, k: int, theorem: TheoremId, level: FactorSpec) -> ConstructionResult:
    shifted = _shift(code.graph, (0, 3), code.codewords)
    layers = []
    for i in range(k):
        layers += [(code.codewords, 6 * i), (shifted, 6 * i + 3)]
    return _result(
        theorem,
        code.graph.factors + (level,),
        _stack(layers, level),
        Claim(QUASI_PERFECT, 2),
        {"base_graph": code.graph.spec, "k": k},
    )


def build_t32(code: Code, k: int) -> ConstructionResult:
    """Perfect 2-code D1 of P_m x P_n at levels 6i, and (0,3)+D1 at 6i+3, in P_{6k-2}.

    The shifted copy has to stay inside the mesh; when it does not the
    construction cannot be carried out and :class:`ConstructionError` is raised.
    """
    _positive("k", k)
    _require_kinds(code.graph, (PATH, PATH), "D1")
    if min(code.graph.shape) < 3:
        raise PreconditionError("both mesh factors need order >= 3")
    _require_perfect(code, 2, "D1")
    return _two_layer_period6(code, k, TheoremId.T3_2, FactorSpec.path(6 * k - 2))


def build_c33(code: Code, k: int) -> ConstructionResult:
    """Toroidal analogue of :func:`build_t32` with level factor C_{6k}."""
    _positive("k", k)
    _require_kinds(code.graph, (CYCLE, CYCLE), "D1")
    if min(code.graph.shape) < 3:
        raise PreconditionError("both cycle factors need order >= 3")
    _require_perfect(code, 2, "D1")
    return _two_layer_period6(code, k, TheoremId.C3_3, FactorSpec.cycle(6 * k))


N34_BLOCK: tuple[Vertex, ...] = ((0, 0, 0), (1, 2, 0), (2, 4, 0), (2, 1, 1), (0, 3, 1), (1, 5, 1))


def build_n34_tile(p: int = 1, q: int = 1) -> ConstructionResult:
    """Tile the six-word block of C3 x C6 x C2 over C_{3p} x C_{6q} x C2."""
    _positive("p", p)
    _positive("q", q)
    words = [(a + 3 * s, b + 6 * t, c) for s in range(p) for t in range(q) for a, b, c in N34_BLOCK]
    return _result(
        TheoremId.N3_4,
        (FactorSpec.cycle(3 * p), FactorSpec.cycle(6 * q), FactorSpec.cycle(2)),
        words,
        Claim(PERFECT, 1),
        {"p": p, "q": q},
    )


T35_D0: tuple[Vertex, ...] = ((0, 0), (1, 2), (2, 4))
T35_D1: tuple[Vertex, ...] = ((2, 1), (0, 3), (1, 5))


def build_t35(k: int) -> ConstructionResult:
    _positive("k", k)
    level = FactorSpec.cycle(4 * k)
    layers = []
    for i in range(k):
        layers += [(T35_D0, 4 * i), (T35_D1, 4 * i + 2)]
    return _result(
        TheoremId.T3_5,
        (FactorSpec.cycle(3), FactorSpec.cycle(6), level),
        _stack(layers, level),
        Claim(QUASI_PERFECT, 1),
        {"k": k},
    )


def build_t36(code: Code, k: int) -> ConstructionResult:
    """Spread the two layers of a perfect 1-code of C_m x C_n x C2 over C_{4k}, period 4."""
    _positive("k", k)
    g = code.graph
    if g.ndim != 3 or not g.all_cycles or g.shape[2] != 2:
        raise PreconditionError(f"D must live in C_m x C_n x C2, got {g.spec}")
    if min(g.shape[:2]) < 2:
        raise PreconditionError("m, n must be >= 2")
    _require_perfect(code, 1, "D")
    bottom, top = code.layer(0).codewords, code.layer(1).codewords
    level = FactorSpec.cycle(4 * k)
    layers = []
    for i in range(k):
        layers += [(bottom, 4 * i), (top, 4 * i + 2)]
    return _result(
        TheoremId.T3_6,
        g.factors[:2] + (level,),
        _stack(layers, level),
        Claim(QUASI_PERFECT, 1),
        {"base_graph": g.spec, "k": k},
    )


_T37_SUPPORTED = {1: (1, 2, 3), 2: (2, 3, 4)}


def build_t37(
    code: Code,
    i: int,
    add_row: bool = False,
    add_col: bool = False,
    k: int | None = None,
) -> ConstructionResult:
    """Re-embed a perfect e-code of C_m x C_n x C_k into C_{m(+1)} x C_{n(+1)} x C_i.

    ``k`` is read off the base graph (two factors, or a trailing C1/C2) and,
    if given, must agree with it.  Only the (k, i) pairs whose layer placement
    is actually worked out are accepted: k=1 with i in {1,2,3} and k=2 with i in {2,3,4}.
    For k=2, i=4 the upper layer moves from level 1 to level 2.
    """
    g = code.graph
    if not g.all_cycles or g.ndim not in (2, 3):
        raise PreconditionError(f"base must be a product of 2 or 3 cycles, got {g.spec}")
    base_k = 1 if g.ndim == 2 else g.shape[2]
    if base_k not in (1, 2):
        raise PreconditionError(f"third factor must be C1 or C2, got {g.factors[2].token}")
    if k is not None and k != base_k:
        raise ConstructionError(f"k={k} does not match base graph {g.spec}")
    if i not in _T37_SUPPORTED[base_k]:
        raise ConstructionError(
            f"(k={base_k}, i={i}) is not covered by the layer argument; supported i: {_T37_SUPPORTED[base_k]}"
        )
    if min(g.shape[:2]) < 2:
        raise PreconditionError("m, n must be >= 2")
    label = classify(code).label
    if label.kind != PERFECT or not label.e or label.e < 1:
        raise PreconditionError(f"base must be a perfect e-code with e >= 1; classifier says {label}")
    e = label.e
    m, n = g.shape[0] + int(add_row), g.shape[1] + int(add_col)
    planar = (FactorSpec.cycle(m), FactorSpec.cycle(n))
    if i == 1:
        factors = planar
        words = [c[:2] for c in code]
    else:
        factors = planar + (FactorSpec.cycle(i),)
        words = [(c[0], c[1], (c[2] if len(c) == 3 else 0)) for c in code]
        if base_k == 2 and i == 4:
            words = [(a, b, 2 * c) for a, b, c in words]
    return _result(
        TheoremId.T3_7,
        factors,
        words,
        Claim(QUASI_PERFECT, e),
        {"base_graph": g.spec, "k": base_k, "i": i, "add_row": bool(add_row), "add_col": bool(add_col)},
    )


def diagonal_slope(n: int) -> tuple[int, int]:
    if 8 <= n <= 9:
        return (1, 2)
    if 10 <= n <= 12 or 14 <= n <= 19:
        return (2, 3)
    if 20 <= n <= 24:
        return (3, 4)
    raise ConstructionError(f"no diagonal code listed for n={n}; n must be in 8..12 or 14..24")


def diagonal_words(n: int, slope: tuple[int, int]) -> list[Vertex]:
    a, b = slope
    return [((a * i) % n, (b * i) % n) for i in range(n)]


def build_n41(n: int) -> ConstructionResult:
    slope = diagonal_slope(n)
    e = 1 if n <= 12 else 2
    return _result(
        TheoremId.N4_1,
        (FactorSpec.cycle(n), FactorSpec.cycle(n)),
        diagonal_words(n, slope),
        Claim(QUASI_PERFECT, e),
        {"n": n},
        [f"slope {slope}"],
    )


C6_DIAGONAL: tuple[Vertex, ...] = tuple(diagonal_words(6, (1, 2)))
_C6_NOTE = "D0 on C6 x C6 taken as {(i, 2i mod 6)}; its (0,3)-translate is the union of the two listed layers"


def build_t42() -> ConstructionResult:
    plane = ProductGraph((FactorSpec.cycle(6), FactorSpec.cycle(6)))
    level = FactorSpec.cycle(2)
    top = plane.translate((0, 3), C6_DIAGONAL)
    return _result(
        TheoremId.T4_2,
        plane.factors + (level,),
        _stack([(C6_DIAGONAL, 0), (top, 1)], level),
        Claim(PERFECT, 1),
        {},
        [_C6_NOTE],
    )


T43A_D1: tuple[Vertex, ...] = ((0, 3), (2, 1), (4, 5))
T43A_D2: tuple[Vertex, ...] = ((1, 5), (3, 3), (5, 1))


def build_t43(variant: str, n: int | None = None, k: int = 1) -> ConstructionResult:
    """Three-layer codes in C_n x C_n x C_{3k} (variants a, b) and the C_n^3 code (variant c).

    Variant c stacks the translate (0, 3i) + D0 at level i of C_n; the level
    placement is a reading of the union, recorded in the notes.
    """
    if variant == "a":
        if n not in (None, 6):
            raise ConstructionError("variant a is defined for n = 6 only")
        n, base, d1, d2 = 6, C6_DIAGONAL, T43A_D1, T43A_D2
        notes = [_C6_NOTE]
    elif variant in ("b", "c"):
        if n is None or not 8 <= n <= 12:
            raise ConstructionError(f"variant {variant} needs 8 <= n <= 12, got {n}")
        base = tuple(diagonal_words(n, diagonal_slope(n)))
        plane = ProductGraph((FactorSpec.cycle(n), FactorSpec.cycle(n)))
        if variant == "c":
            level = FactorSpec.cycle(n)
            layers = [(plane.translate((0, 3 * i), base), i) for i in range(n)]
            return _result(
                TheoremId.T4_3c,
                plane.factors + (level,),
                _stack(layers, level),
                Claim(QUASI_PERFECT, 1),
                {"n": n},
                ["translate (0,3i)+D0 placed at level i"],
            )
        d1 = plane.translate((0, 3), base)
        d2 = plane.translate((0, n - 3), base)
        notes = []
    else:
        raise ConstructionError(f"unknown variant {variant!r}")
    _positive("k", k)
    level = FactorSpec.cycle(3 * k)
    layers = []
    for i in range(k):
        layers += [(base, 3 * i), (d1, 3 * i + 1), (d2, 3 * i + 2)]
    theorem = TheoremId.T4_3a if variant == "a" else TheoremId.T4_3b
    return _result(
        theorem,
        (FactorSpec.cycle(n), FactorSpec.cycle(n), level),
        _stack(layers, level),
        Claim(QUASI_PERFECT, 1),
        {"n": n, "k": k},
        notes,
    )


def build_t44(variant: str, n: int | None = None, k: int = 1) -> ConstructionResult:
    _positive("k", k)
    if variant == "a":
        if n not in (None, 14):
            raise ConstructionError("variant a is defined for n = 14 only")
        n = 14
        offsets, period = [(1, n - 2)], 4
        theorem = TheoremId.T4_4a
    elif variant == "b":
        if n is None or not 14 <= n <= 19:
            raise ConstructionError(f"variant b needs 14 <= n <= 19, got {n}")
        offsets, period = [(1, 5), (3, 1)], 6
        theorem = TheoremId.T4_4b
    else:
        raise ConstructionError(f"unknown variant {variant!r}")
    plane = ProductGraph((FactorSpec.cycle(n), FactorSpec.cycle(n)))
    base = diagonal_words(n, diagonal_slope(n))
    copies = [base] + [plane.translate(o, base) for o in offsets]
    level = FactorSpec.cycle(period * k)
    layers = [(copy, period * i + 2 * j) for i in range(k) for j, copy in enumerate(copies)]
    return _result(
        theorem,
        plane.factors + (level,),
        _stack(layers, level),
        Claim(QUASI_PERFECT, 2),
        {"n": n, "k": k},
    )


def build_t51(e: int, case: int) -> ConstructionResult:
    """Mesh codes; the 1-based codeword lists are shifted down by one."""
    _positive("e", e)
    if case == 1:
        n = 2 * e + 3
        factors = (FactorSpec.path(n), FactorSpec.path(n))
        words = [(0, 0), (e + 1, e + 1), (n - 1, n - 1), (0, n - 1), (n - 1, 0)]
        params = {"e": e, "case": 1, "m": n, "n": n}
    elif case == 2:
        m, n = e + 1, e + 3
        factors = (FactorSpec.path(m), FactorSpec.path(n))
        words = [(0, 0), (m - 1, n - 2)]
        params = {"e": e, "case": 2, "m": m, "n": n}
    else:
        raise ConstructionError(f"case must be 1 or 2, got {case!r}")
    theorem = TheoremId.T5_1a if case == 1 else TheoremId.T5_1b
    return _result(theorem, factors, words, Claim(QUASI_PERFECT, e), params, ["0-based; add 1 to each coordinate for the 1-based form"])


def _mesh_order(n: int) -> int:
    if isinstance(n, bool) or not isinstance(n, int) or n < 2:
        raise ConstructionError(f"n must be an integer >= 2, got {n!r}")
    return n


def build_triv_pn(n: int) -> ConstructionResult:
    n = _mesh_order(n)
    return _result(
        TheoremId.TRIV_PN,
        (FactorSpec.path(n), FactorSpec.path(n)),
        [(0, 0), (n - 1, n - 1)],
        Claim(QUASI_PERFECT, n - 2),
        {"n": n},
    )


def build_o52(n: int) -> ConstructionResult:
    n = _mesh_order(n)
    return _result(
        TheoremId.O5_2,
        (FactorSpec.path(n), FactorSpec.path(n), FactorSpec.path(2)),
        [(0, 0, 0), (n - 1, n - 1, 1)],
        Claim(PERFECT, n - 1),
        {"n": n},
    )


def build_t53(n: int, l: int) -> ConstructionResult:  # noqa: E741
    n = _mesh_order(n)
    if l == 4:
        words = [(0, 0, 1), (n - 1, n - 1, 2)]
    elif l == 3:
        words = [(0, 0, 0), (n - 1, n - 1, 2)]
    else:
        raise ConstructionError(f"l must be 3 or 4, got {l!r}")
    return _result(
        TheoremId.T5_3,
        (FactorSpec.path(n), FactorSpec.path(n), FactorSpec.path(l)),
        words,
        Claim(QUASI_PERFECT, n - 1),
        {"n": n, "l": l},
    )


@dataclass(frozen=True)
class Recipe:
    """How to call a generator from named string parameters."""

    builder: Callable[..., ConstructionResult]
    params: dict[str, Callable[[str], Any]]
    needs_code: bool = False
    fixed: dict[str, Any] = field(default_factory=dict)


def _flag(text: str) -> bool:
    lowered = text.strip().lower()
    if lowered in ("1", "true", "yes", "y"):
        return True
    if lowered in ("0", "false", "no", "n"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


RECIPES: dict[TheoremId, Recipe] = {
    TheoremId.T3_1: Recipe(build_t31, {"e": int, "k": int, "ext": str}, needs_code=True),
    TheoremId.T3_2: Recipe(build_t32, {"k": int}, needs_code=True),
    TheoremId.C3_3: Recipe(build_c33, {"k": int}, needs_code=True),
    TheoremId.N3_4: Recipe(build_n34_tile, {"p": int, "q": int}),
    TheoremId.T3_5: Recipe(build_t35, {"k": int}),
    TheoremId.T3_6: Recipe(build_t36, {"k": int}, needs_code=True),
    TheoremId.T3_7: Recipe(build_t37, {"i": int, "add_row": _flag, "add_col": _flag, "k": int}, needs_code=True),
    TheoremId.N4_1: Recipe(build_n41, {"n": int}),
    TheoremId.T4_2: Recipe(build_t42, {}),
    TheoremId.T4_3a: Recipe(build_t43, {"n": int, "k": int}, fixed={"variant": "a"}),
    TheoremId.T4_3b: Recipe(build_t43, {"n": int, "k": int}, fixed={"variant": "b"}),
    TheoremId.T4_3c: Recipe(build_t43, {"n": int, "k": int}, fixed={"variant": "c"}),
    TheoremId.T4_4a: Recipe(build_t44, {"n": int, "k": int}, fixed={"variant": "a"}),
    TheoremId.T4_4b: Recipe(build_t44, {"n": int, "k": int}, fixed={"variant": "b"}),
    TheoremId.T5_1a: Recipe(build_t51, {"e": int}, fixed={"case": 1}),
    TheoremId.T5_1b: Recipe(build_t51, {"e": int}, fixed={"case": 2}),
    TheoremId.TRIV_PN: Recipe(build_triv_pn, {"n": int}),
    TheoremId.O5_2: Recipe(build_o52, {"n": int}),
    TheoremId.T5_3: Recipe(build_t53, {"n": int, "l": int}),
}


def construct(tag: str | TheoremId, params: dict[str, str] | None = None, code: Code | None = None) -> ConstructionResult:
    """Run the generator for ``tag`` with string-valued parameters (CLI entry point)."""
    try:
        theorem = TheoremId(tag)
    except ValueError:
        raise ConstructionError(f"unknown theorem tag {tag!r}; known: {', '.join(t.value for t in TheoremId)}") from None
    recipe = RECIPES[theorem]
    kwargs: dict[str, Any] = dict(recipe.fixed)
    for name, raw in (params or {}).items():
        if name not in recipe.params:
            raise ConstructionError(f"{theorem.value} takes no parameter {name!r}; expected {sorted(recipe.params)}")
        try:
            kwargs[name] = recipe.params[name](raw)
        except ValueError as exc:
            raise ConstructionError(f"bad value for {name}: {exc}") from exc
    args: tuple = ()
    if recipe.needs_code:
        if code is None:
            raise ConstructionError(f"{theorem.value} needs an input code (--code)")
        args = (code,)
    elif code is not None:
        raise ConstructionError(f"{theorem.value} takes no input code")
    try:
        return recipe.builder(*args, **kwargs)
    except TypeError as exc:
        raise ConstructionError(f"{theorem.value}: {exc}") from exc
