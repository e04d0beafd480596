"""One document grammar for brackets and graphs (a top-level "kind"
discriminator), with exact round-tripping of rational coefficient tokens.

Coefficients may be JSON numbers or strings: "3", "-2/3", "sqrt(5)",
"sqrt(4/5)", "-sqrt(1/2)".  String tokens are kept verbatim so that
re-emitting a parsed document reproduces them byte for byte; each entry
carries an exactness flag recording whether the binary64 value represents
the token exactly.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .brackets import Bracket
from .graphs import Graph

_RATIONAL_RE = re.compile(r"^(-?\d+)(?:/(\d+))?$")
_SQRT_RE = re.compile(r"^(-?)sqrt\((\d+)(?:/(\d+))?\)$")


class DocumentError(ValueError):
    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.line = line
        self.column = column
        where = f" (line {line}, column {column})" if line is not None else ""
        super().__init__(message + where)


def parse_coefficient(raw) -> tuple[float, bool]:
    """Resolve a coefficient token to binary64; the flag is True when the
    float is exactly the mathematical value of the token."""
    if isinstance(raw, (int, float)):
        return float(raw), True
    token = str(raw).strip().replace(" ", "")
    m = _RATIONAL_RE.match(token)
    if m:
        frac = Fraction(int(m.group(1)), int(m.group(2) or 1))
        value = float(frac)
        return value, Fraction(value) == frac
    m = _SQRT_RE.match(token)
    if m:
        frac = Fraction(int(m.group(2)), int(m.group(3) or 1))
        value = float(np.sqrt(float(frac)))
        if m.group(1) == "-":
            value = -value
        return value, Fraction(value) ** 2 == frac
    raise DocumentError(f"cannot parse coefficient token {raw!r}")


def format_float(x: float) -> float | int:
    return int(x) if float(x).is_integer() and abs(x) < 2**53 else float(x)


@dataclass(frozen=True)
class BracketEntryDoc:
    i: int
    j: int
    k: int
    raw: object  # original token (str or number)
    value: float
    exact: bool


@dataclass(frozen=True)
class BracketDocument:
    dim: int
    entries: tuple[BracketEntryDoc, ...]
    name: str | None = None
    source: str | None = None

    def to_bracket(self) -> Bracket:
        return Bracket(self.dim, {(e.i, e.j, e.k): e.value for e in self.entries})

    def emit(self) -> dict:
        doc: dict = {"kind": "bracket", "dim": self.dim}
        if self.name:
            doc["name"] = self.name
        if self.source:
            doc["source"] = self.source
        doc["entries"] = [
            {"i": e.i, "j": e.j, "k": e.k, "c": e.raw} for e in self.entries
        ]
        return doc


@dataclass(frozen=True)
class GraphDocument:
    vertex_count: int
    edges: tuple[tuple[int, int], ...]
    name: str | None = None

    def to_graph(self) -> Graph:
        return Graph(self.vertex_count, self.edges, name=self.name)

    def emit(self) -> dict:
        doc: dict = {"kind": "graph", "vertices": self.vertex_count}
        if self.name:
            doc["name"] = self.name
        doc["edges"] = [[u, v] for (u, v) in self.edges]
        return doc


def bracket_to_document(b: Bracket, name: str | None = None) -> BracketDocument:
    entries = tuple(
        BracketEntryDoc(i=i, j=j, k=k, raw=format_float(c), value=c, exact=True)
        for (i, j, k), c in b.coeffs.items()
    )
    return BracketDocument(dim=b.dim, entries=entries, name=name)


def graph_to_document(g: Graph) -> GraphDocument:
    return GraphDocument(vertex_count=g.vertex_count, edges=g.edges, name=g.name)


def _parse_bracket_dict(data: dict) -> BracketDocument:
    try:
        dim = int(data["dim"])
    except KeyError:
        raise DocumentError("bracket document is missing 'dim'")
    raw_entries = data.get("entries", [])
    entries = []
    for idx, item in enumerate(raw_entries):
        try:
            i, j, k = int(item["i"]), int(item["j"]), int(item["k"])
            raw = item["c"]
        except (KeyError, TypeError, ValueError) as exc:
            raise DocumentError(f"bad entry #{idx + 1}: {exc}")
        value, exact = parse_coefficient(raw)
        if not (1 <= i < j <= dim) or not (1 <= k <= dim):
            raise DocumentError(f"entry #{idx + 1}: indices ({i},{j},{k}) out of range")
        entries.append(BracketEntryDoc(i=i, j=j, k=k, raw=raw, value=value, exact=exact))
    keys = [(e.i, e.j, e.k) for e in entries]
    if len(set(keys)) != len(keys):
        raise DocumentError("duplicate entry keys")
    return BracketDocument(
        dim=dim,
        entries=tuple(entries),
        name=data.get("name"),
        source=data.get("source"),
    )


def _parse_graph_dict(data: dict) -> GraphDocument:
    try:
        p = int(data["vertices"])
    except KeyError:
        raise DocumentError("graph document is missing 'vertices'")
    edges = []
    for idx, pair in enumerate(data.get("edges", [])):
        try:
            u, v = int(pair[0]), int(pair[1])
        except (TypeError, ValueError, IndexError) as exc:
            raise DocumentError(f"bad edge #{idx + 1}: {exc}")
        edges.append((u, v))
    try:
        doc = GraphDocument(vertex_count=p, edges=tuple(edges), name=data.get("name"))
        doc.to_graph()
    except Exception as exc:
        raise DocumentError(str(exc))
    return doc


def parse_document(text: str) -> BracketDocument | GraphDocument:
    """Parse a JSON document with a 'kind' discriminator."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DocumentError(exc.msg, line=exc.lineno, column=exc.colno)
    return parse_document_dict(data)


def parse_document_dict(data) -> BracketDocument | GraphDocument:
    if not isinstance(data, dict):
        raise DocumentError("document must be a JSON object")
    kind = data.get("kind")
    if kind == "bracket":
        return _parse_bracket_dict(data)
    if kind == "graph":
        return _parse_graph_dict(data)
    raise DocumentError(f"unknown document kind {kind!r}")


def parse_edge_list(text: str, name: str | None = None) -> GraphDocument:
    """Plain text edge list: one 'u v' pair per line, 1-based; blank lines and
    '#' comments are ignored."""
    edges = []
    max_vertex = 0
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        parts = stripped.split()
        if len(parts) != 2:
            raise DocumentError("expected 'u v'", line=lineno, column=1)
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError:
            raise DocumentError("vertices must be integers", line=lineno, column=1)
        edges.append((u, v))
        max_vertex = max(max_vertex, u, v)
    return GraphDocument(vertex_count=max_vertex, edges=tuple(edges), name=name)


def emit_json(doc: BracketDocument | GraphDocument) -> str:
    return json.dumps(doc.emit(), indent=2) + "\n"


@dataclass(frozen=True)
class ManifestItem:
    path: str
    command: str = "analyze"  # analyze | flow | graph
    analyses: tuple[str, ...] = ()
    options: dict = field(default_factory=dict)


def parse_manifest(text: str) -> tuple[ManifestItem, ...]:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DocumentError(exc.msg, line=exc.lineno, column=exc.colno)
    if not isinstance(data, dict) or not isinstance(data.get("items"), list):
        raise DocumentError("manifest must be an object with an 'items' list")
    items = []
    for idx, item in enumerate(data["items"]):
        if not isinstance(item, dict) or "path" not in item:
            raise DocumentError(f"manifest item #{idx + 1} needs a 'path'")
        items.append(
            ManifestItem(
                path=str(item["path"]),
                command=str(item.get("command", "analyze")),
                analyses=tuple(item.get("analyses", ())),
                options=dict(item.get("options", {})),
            )
        )
    return tuple(items)
