"""Code files, JSON/text reports and the layered ASCII renderer."""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .code_metrics import PERFECT, QUASI_PERFECT, Code, CodeReport, sweep_distances
from .product_graph import GraphSpecError, ProductGraph, parse_graph_spec


class CodeFileError(ValueError):
    pass


@dataclass
class CodeFile:
    """On-disk form of a code: graph spec, codewords, optional claim and provenance."""

    graph: str
    codewords: list[list[int]]
    claim: tuple[str, int] | None = None
    provenance: dict[str, Any] | None = None
    extra: dict[str, Any] = field(default_factory=dict)

    def to_code(self, graph: ProductGraph | None = None) -> Code:
        try:
            graph = graph or parse_graph_spec(self.graph)
            return Code(graph, self.codewords)
        except ValueError as exc:
            raise CodeFileError(str(exc)) from exc

    @classmethod
    def from_code(cls, code: Code, claim=None, provenance=None) -> "CodeFile":
        return cls(code.graph.spec, [list(c) for c in code], claim, provenance)

    @classmethod
    def from_dict(cls, data: Any) -> "CodeFile":
        if not isinstance(data, dict):
            raise CodeFileError("code file must hold a JSON object")
        unknown = set(data) - {"graph", "codewords", "claim", "provenance"}
        if unknown:
            raise CodeFileError(f"unknown keys in code file: {sorted(unknown)}")
        graph = data.get("graph")
        if not isinstance(graph, str):
            raise CodeFileError("'graph' must be a spec string")
        words = data.get("codewords")
        if not isinstance(words, list) or not all(
            isinstance(w, list) and all(isinstance(a, int) and not isinstance(a, bool) for a in w) for w in words
        ):
            raise CodeFileError("'codewords' must be a list of integer lists")
        claim = data.get("claim")
        if claim is not None:
            if not isinstance(claim, dict) or claim.get("kind") not in (PERFECT, QUASI_PERFECT):
                raise CodeFileError("'claim' must be {'kind': 'perfect'|'quasi_perfect', 'e': int}")
            e = claim.get("e")
            if not isinstance(e, int) or isinstance(e, bool) or e < 0:
                raise CodeFileError("claim 'e' must be a non-negative integer")
            claim = (claim["kind"], e)
        return cls(graph, words, claim, data.get("provenance"))

    def to_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {"graph": self.graph, "codewords": sorted(self.codewords)}
        if self.claim is not None:
            out["claim"] = {"kind": self.claim[0], "e": self.claim[1]}
        if self.provenance is not None:
            out["provenance"] = self.provenance
        return out

    def dumps(self) -> str:
        """Canonical text: sorted keys, sorted codewords, one codeword per line."""
        data = self.to_dict()
        lines = ["{"]
        keys = sorted(data)
        for n, key in enumerate(keys):
            comma = "," if n < len(keys) - 1 else ""
            if key == "codewords":
                words = data[key]
                if not words:
                    lines.append(f'  "codewords": []{comma}')
                    continue
                lines.append('  "codewords": [')
                for i, w in enumerate(words):
                    lines.append("    " + json.dumps(w) + ("," if i < len(words) - 1 else ""))
                lines.append("  ]" + comma)
            else:
                lines.append(f"  {json.dumps(key)}: {json.dumps(data[key], sort_keys=True)}{comma}")
        lines.append("}")
        return "\n".join(lines) + "\n"


def loads_code_file(text: str) -> CodeFile:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise CodeFileError(f"invalid JSON: {exc}") from exc
    return CodeFile.from_dict(data)


def load_code_file(path: str | os.PathLike) -> CodeFile:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise CodeFileError(f"cannot read {path}: {exc}") from exc
    return loads_code_file(text)


def build_report(
    code: Code,
    report: CodeReport,
    claim: tuple[str, int] | None = None,
    timing: float | None = None,
    **extra: Any,
) -> dict[str, Any]:
    out: dict[str, Any] = {"graph": code.graph.spec, "code_size": len(code)}
    out.update(report.to_dict())
    out["witnesses"] = {"closest_pair": out.pop("closest_pair"), "farthest_vertex": out.pop("farthest_vertex")}
    if claim is not None:
        kind, e = claim
        out["claim"] = f"{kind}({e})"
        out["verdict"] = "holds" if str(report.label) == out["claim"] else "refuted"
    if timing is not None:
        out["timing_s"] = round(timing, 6)
    out.update(extra)
    return out


def format_report(report: dict[str, Any], fmt: str = "json") -> str:
    if fmt == "json":
        return json.dumps(report, indent=2, sort_keys=True) + "\n"
    lines = []
    for key in sorted(report):
        value = report[key]
        if isinstance(value, (dict, list)):
            value = json.dumps(value, sort_keys=True)
        lines.append(f"{key}: {value}")
    return "\n".join(lines) + "\n"


def render(code: Code, e: int) -> str:
    """One grid per level of the last coordinate.

    Rows follow the first coordinate, columns the second.  ``#`` marks a
    codeword, ``+`` a vertex at distance exactly ``e + 1`` from the code and
    ``.`` everything else.
    """
    g = code.graph
    if g.ndim > 3:
        raise GraphSpecError(f"can only render up to 3 factors, {g.spec} has {g.ndim}")
    dist = sweep_distances(code)
    glyphs = np.full(dist.shape, ".", dtype="<U1")
    glyphs[dist == e + 1] = "+"
    glyphs[dist == 0] = "#"
    if g.ndim == 1:
        blocks = [("", glyphs.reshape(1, -1))]
    elif g.ndim == 2:
        blocks = [("", glyphs)]
    else:
        blocks = [(f"level {z}", glyphs[:, :, z]) for z in range(g.shape[2])]
    out = []
    for title, grid in blocks:
        if title:
            out.append(title)
        out.extend("".join(row) for row in grid)
        out.append("")
    return "\n".join(out)
