"""Undirected simple graphs, line graphs, exact edge weightings, positivity,
the one-dominating-edge family, forbidden-configuration witnesses, and the
associated 2-step nilpotent brackets.

All weighting arithmetic is exact rational: positivity is a strict sign
condition and several interesting graphs sit exactly on the boundary
(a zero weight), so floating tolerances are never allowed to decide it.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import rational
from .brackets import Bracket

Edge = tuple[int, int]


class GraphError(ValueError):
    """Malformed graph data."""


@dataclass(frozen=True)
class Graph:
    """Simple graph on vertices 1..p with a fixed edge enumeration; the edge
    order is the canonical enumeration used by all weightings downstream."""

    vertex_count: int
    edges: tuple[Edge, ...]
    name: str | None = None

    def __post_init__(self):
        p = self.vertex_count
        if p < 0:
            raise GraphError("vertex count must be nonnegative")
        seen = set()
        norm = []
        for (u, v) in self.edges:
            if u == v:
                raise GraphError(f"loop at vertex {u}")
            if not (1 <= u <= p and 1 <= v <= p):
                raise GraphError(f"edge ({u},{v}) out of range")
            key = (min(u, v), max(u, v))
            if key in seen:
                raise GraphError(f"duplicate edge {key}")
            seen.add(key)
            norm.append(key)
        object.__setattr__(self, "edges", tuple(norm))

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    def degrees(self) -> list[int]:
        deg = [0] * (self.vertex_count + 1)
        for (u, v) in self.edges:
            deg[u] += 1
            deg[v] += 1
        return deg

    def neighbors(self, v: int) -> list[int]:
        out = []
        for (a, b) in self.edges:
            if a == v:
                out.append(b)
            elif b == v:
                out.append(a)
        return out

    def isolated_vertices(self) -> tuple[int, ...]:
        deg = self.degrees()
        return tuple(v for v in range(1, self.vertex_count + 1) if deg[v] == 0)

    def without_isolated_vertices(self) -> tuple["Graph", tuple[int, ...]]:
        isolated = self.isolated_vertices()
        if not isolated:
            return self, ()
        keep = [v for v in range(1, self.vertex_count + 1) if v not in set(isolated)]
        relabel = {v: i + 1 for i, v in enumerate(keep)}
        edges = tuple((relabel[u], relabel[v]) for (u, v) in self.edges)
        return Graph(len(keep), edges, name=self.name), isolated


def line_graph(g: Graph) -> Graph:
    """Graph on the edges of g; two edges are adjacent iff they share an
    endpoint.  Vertex k of the result is edge k of g."""
    q = g.edge_count
    edges = []
    for a in range(q):
        for b in range(a + 1, q):
            if set(g.edges[a]) & set(g.edges[b]):
                edges.append((a + 1, b + 1))
    return Graph(q, tuple(edges))


def adjacency_matrix(g: Graph) -> np.ndarray:
    A = np.zeros((g.vertex_count, g.vertex_count), dtype=np.int64)
    for (u, v) in g.edges:
        A[u - 1, v - 1] = A[v - 1, u - 1] = 1
    return A


def payne_graph_matrix(g: Graph) -> np.ndarray:
    """Exact integer matrix 3I + Adj(L(g)) governing the edge weighting."""
    q = g.edge_count
    return 3 * np.eye(q, dtype=np.int64) + adjacency_matrix(line_graph(g))


@dataclass(frozen=True)
class Weighting:
    """Edge weighting (c_1, ..., c_q) with 3 c_k + sum of adjacent weights
    equal to nu for every edge."""

    values: tuple[Fraction, ...]
    nu: Fraction
    normalization: str  # "nu_one" | "integer"

    def integer_normalized(self) -> "Weighting":
        ints, factor = rational.integer_normalized(self.values)
        return Weighting(
            values=tuple(Fraction(x) for x in ints),
            nu=self.nu * factor,
            normalization="integer",
        )

    @property
    def all_positive(self) -> bool:
        return all(v > 0 for v in self.values)

    def nonpositive_indices(self) -> tuple[int, ...]:
        return tuple(i for i, v in enumerate(self.values) if v <= 0)


def weighting(g: Graph) -> Weighting:
    """Unique exact solution of (3I + Adj L(g)) c = nu [1...1] with nu = 1.
    The matrix is positive definite, so the solution always exists."""
    if g.edge_count == 0:
        raise GraphError("graph has no edges to weight")
    U = payne_graph_matrix(g)
    sol = rational.solve(U.tolist(), [1] * g.edge_count)
    return Weighting(values=tuple(sol), nu=Fraction(1), normalization="nu_one")


def is_positive(g: Graph) -> bool:
    """Strict positivity of the edge weighting, decided exactly."""
    return weighting(g).all_positive


# -- the one-dominating-edge family -------------------------------------------


def grst(r: int, s: int, t: int) -> Graph:
    """Graph with a central edge vw adjacent to every other edge: r pendant
    edges at v, s at w, and t triangles over vw.  Canonical edge order:
    pendants at v, pendants at w, triangle pairs (v-side, w-side), central
    edge last.  Requires r >= s and (s, t) != (0, 0)."""
    if r < 0 or s < 0 or t < 0:
        raise GraphError("parameters must be nonnegative")
    if r < s:
        raise GraphError("expected r >= s")
    if s == 0 and t == 0:
        raise GraphError("expected s != 0 or t != 0")
    v, w = 1, 2
    p = r + s + t + 2
    edges: list[Edge] = []
    nxt = 3
    for _ in range(r):
        edges.append((v, nxt))
        nxt += 1
    for _ in range(s):
        edges.append((w, nxt))
        nxt += 1
    for _ in range(t):
        edges.append((v, nxt))
        edges.append((w, nxt))
        nxt += 1
    edges.append((v, w))
    return Graph(p, tuple(edges), name=f"G({r},{s},{t})")


def grst_is_positive(r: int, s: int, t: int) -> bool:
    """Closed-form positivity for the one-dominating-edge family: the graph
    fails to be positive exactly when one of the forbidden-parameter
    conditions holds."""
    if r < 0 or s < 0 or t < 0 or r < s or (s == 0 and t == 0):
        raise GraphError("invalid parameters")
    not_positive = (
        r * s >= 4
        or t >= 3
        or (t >= 1 and t + r / 2 >= 3)
        or (r >= 2 and s >= 1 and t >= 1)
        or (s >= 1 and t >= 2)
    )
    return not not_positive


# The minimal nonpositive configurations used as forbidden witnesses.
FORBIDDEN_CONFIGURATIONS: tuple[tuple[int, int, int], ...] = (
    (2, 2, 0),
    (0, 0, 3),
    (2, 1, 1),
    (4, 1, 0),
    (2, 0, 2),
    (4, 0, 1),
    (1, 1, 2),
)


@dataclass(frozen=True)
class ForbiddenWitness:
    configuration: tuple[int, int, int]
    central_edge: Edge
    pendants_at_v: tuple[int, ...]
    pendants_at_w: tuple[int, ...]
    apexes: tuple[int, ...]


def forbidden_witness(g: Graph) -> ForbiddenWitness | None:
    """Search for a faithful embedding of one of the minimal nonpositive
    configurations: around each candidate central edge (v, w), count pendant
    neighbours of valency one, and common neighbours of valency two."""
    deg = g.degrees()
    adj = {v: set(g.neighbors(v)) for v in range(1, g.vertex_count + 1)}
    for (a, b) in g.edges:
        for (v, w) in ((a, b), (b, a)):
            pend_v = tuple(x for x in sorted(adj[v] - {w}) if deg[x] == 1)
            pend_w = tuple(x for x in sorted(adj[w] - {v}) if deg[x] == 1)
            apexes = tuple(x for x in sorted(adj[v] & adj[w]) if deg[x] == 2)
            for (r, s, t) in FORBIDDEN_CONFIGURATIONS:
                if len(pend_v) >= r and len(pend_w) >= s and len(apexes) >= t:
                    return ForbiddenWitness(
                        configuration=(r, s, t),
                        central_edge=(v, w),
                        pendants_at_v=pend_v[:r],
                        pendants_at_w=pend_w[:s],
                        apexes=apexes[:t],
                    )
    return None


def tree_valency_hypothesis(g: Graph) -> bool:
    """True iff g is a tree in which every edge is adjacent to at most three
    other edges; such trees are always positive."""
    p, q = g.vertex_count, g.edge_count
    if q != p - 1 or p == 0:
        return False
    # connectivity by union-find
    parent = list(range(p + 1))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for (u, v) in g.edges:
        ru, rv = find(u), find(v)
        if ru == rv:
            return False
        parent[ru] = rv
    if len({find(v) for v in range(1, p + 1)}) != 1:
        return False
    deg = g.degrees()
    return all(deg[u] + deg[v] - 2 <= 3 for (u, v) in g.edges)


# -- graph to bracket ----------------------------------------------------------


def to_bracket(g: Graph, coefficients=None) -> Bracket:
    """2-step nilpotent bracket on R^(p+q): edge k = (v_i, v_j) contributes
    mu(e_i, e_j) = a_k e_(p+k); default coefficients are all one."""
    p, q = g.vertex_count, g.edge_count
    if coefficients is None:
        coefficients = [1.0] * q
    coefficients = [float(c) for c in coefficients]
    if len(coefficients) != q:
        raise GraphError(f"expected {q} coefficients, got {len(coefficients)}")
    entries = {}
    for k, (u, v) in enumerate(g.edges):
        if coefficients[k] != 0.0:
            entries[(u, v, p + k + 1)] = coefficients[k]
    return Bracket(p + q, entries)


@dataclass(frozen=True)
class GraphNilradicalReport:
    positive: bool
    weighting: Weighting
    integer_weighting: Weighting
    soliton_bracket: Bracket | None
    witness: ForbiddenWitness | None
    stripped_isolated: tuple[int, ...]

    def __str__(self) -> str:
        if self.positive:
            return "positive graph: the attached 2-step algebra admits a nilsoliton metric"
        bad = self.integer_weighting.nonpositive_indices()
        return f"not positive (nonpositive weights at edges {tuple(i + 1 for i in bad)})"


def graph_einstein_nilradical(g: Graph) -> GraphNilradicalReport:
    """Decide whether the 2-step algebra attached to g admits a nilsoliton
    metric: equivalent to strict positivity of the edge weighting.  When
    positive, the soliton bracket carries coefficients sqrt(c_k) from the
    nu = 1 weighting."""
    core, isolated = g.without_isolated_vertices()
    wt = weighting(core)
    positive = wt.all_positive
    soliton_bracket = None
    if positive:
        soliton_bracket = to_bracket(core, [float(np.sqrt(float(c))) for c in wt.values])
    return GraphNilradicalReport(
        positive=positive,
        weighting=wt,
        integer_weighting=wt.integer_normalized(),
        soliton_bracket=soliton_bracket,
        witness=None if positive else forbidden_witness(core),
        stripped_isolated=isolated,
    )
