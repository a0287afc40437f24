"""Simple graphs on vertices 0..n-1 with adjacency stored as per-vertex bitsets.

Family constructors label deterministically:

- ``make_complete(t)``: vertices 0..t-1.
- ``make_cycle(k)``: edges i ~ i+1 (mod k).
- ``disjoint_union(parts)``: part i is shifted by the vertex count of parts before it.
- ``make_barK(t, n)``: 0..t-1 is the clique side, t..n-1 the independent side.
- ``glue_at_vertex(g, k)``: vertex 0 is shared, copy i maps v >= 1 to 1 + i(n-1) + (v-1).
"""
from __future__ import annotations

import logging
import re
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from pathlib import Path
from typing import Iterable, Iterator, Sequence

import networkx as nx

from .errors import BudgetExceeded, GraphFormatError, InvalidGraphError
from .settings import BUDGETS

log = logging.getLogger(__name__)


def iter_bits(mask: int) -> Iterator[int]:
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def bits_to_set(mask: int) -> frozenset[int]:
    return frozenset(iter_bits(mask))


def set_to_bits(vertices: Iterable[int]) -> int:
    mask = 0
    for v in vertices:
        mask |= 1 << v
    return mask


@dataclass(frozen=True)
class Graph:
    n: int
    adjacency: tuple[int, ...]
    edge_count: int = field(default=-1, compare=False)

    def __post_init__(self):
        if self.n < 0 or len(self.adjacency) != self.n:
            raise InvalidGraphError(f"adjacency has {len(self.adjacency)} rows for n={self.n}")
        total = 0
        for v, row in enumerate(self.adjacency):
            if row >> self.n:
                raise InvalidGraphError(f"vertex {v} has a neighbour outside 0..{self.n - 1}")
            if row >> v & 1:
                raise InvalidGraphError(f"self-loop at vertex {v}")
            for u in iter_bits(row):
                if not self.adjacency[u] >> v & 1:
                    raise InvalidGraphError(f"adjacency is not symmetric at {u}, {v}")
            total += row.bit_count()
        object.__setattr__(self, "edge_count", total // 2)

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]]) -> "Graph":
        rows = [0] * n
        for u, v in edges:
            if not (0 <= u < n and 0 <= v < n):
                raise InvalidGraphError(f"edge ({u}, {v}) outside 0..{n - 1}")
            if u == v:
                raise InvalidGraphError(f"self-loop at vertex {u}")
            if rows[u] >> v & 1:
                raise InvalidGraphError(f"parallel edge ({u}, {v})")
            rows[u] |= 1 << v
            rows[v] |= 1 << u
        return cls(n, tuple(rows))

    @property
    def vertex_mask(self) -> int:
        return (1 << self.n) - 1

    def has_edge(self, u: int, v: int) -> bool:
        return bool(self.adjacency[u] >> v & 1)

    def neighbors(self, v: int) -> frozenset[int]:
        return bits_to_set(self.adjacency[v])

    def degree(self, v: int) -> int:
        return self.adjacency[v].bit_count()

    def edges(self) -> list[tuple[int, int]]:
        return [(u, v) for u in range(self.n) for v in iter_bits(self.adjacency[u] >> (u + 1) << (u + 1))]

    def add_edge(self, u: int, v: int) -> "Graph":
        if u == v or self.has_edge(u, v):
            raise InvalidGraphError(f"cannot add edge ({u}, {v})")
        rows = list(self.adjacency)
        rows[u] |= 1 << v
        rows[v] |= 1 << u
        return Graph(self.n, tuple(rows))

    def complement(self) -> "Graph":
        full = self.vertex_mask
        return Graph(self.n, tuple(full & ~row & ~(1 << v) for v, row in enumerate(self.adjacency)))

    def edges_within(self, mask: int) -> int:
        return sum((self.adjacency[v] & mask).bit_count() for v in iter_bits(mask)) // 2


def make_null() -> Graph:
    return Graph(0, ())


def make_empty(n: int) -> Graph:
    if n < 0:
        raise InvalidGraphError(f"vertex count must be nonnegative, got {n}")
    return Graph(n, (0,) * n)


def make_complete(t: int) -> Graph:
    if t < 1:
        raise InvalidGraphError(f"K_t needs t >= 1, got {t}; use make_null() for the null graph")
    full = (1 << t) - 1
    return Graph(t, tuple(full & ~(1 << v) for v in range(t)))


def make_cycle(k: int) -> Graph:
    if k < 3:
        raise InvalidGraphError(f"cycle length must be at least 3, got {k}")
    return Graph.from_edges(k, ((i, (i + 1) % k) for i in range(k)))


def disjoint_union(parts: Sequence[Graph]) -> Graph:
    rows: list[int] = []
    for part in parts:
        offset = len(rows)
        rows.extend(row << offset for row in part.adjacency)
    return Graph(len(rows), tuple(rows))


def make_barK(t: int, n: int) -> Graph:
    """K_{t,n-t} with the t-side completed to a clique; nt - t(t+1)/2 edges."""
    if not 0 <= t <= n:
        raise InvalidGraphError(f"barK needs 0 <= t <= n, got t={t}, n={n}")
    edges = [(u, v) for u in range(t) for v in range(u + 1, n)]
    return Graph.from_edges(n, edges)


def glue_at_vertex(g: Graph, k: int) -> Graph:
    if g.n < 1:
        raise InvalidGraphError("cannot glue copies of the null graph")
    if k < 1:
        raise InvalidGraphError(f"need at least one copy, got k={k}")

    def relabel(copy: int, v: int) -> int:
        return 0 if v == 0 else 1 + copy * (g.n - 1) + (v - 1)

    edges = [(relabel(i, u), relabel(i, v)) for i in range(k) for u, v in g.edges()]
    return Graph.from_edges(k * (g.n - 1) + 1, edges)


def components(g: Graph) -> list[frozenset[int]]:
    seen = 0
    found = []
    for v in range(g.n):
        if seen >> v & 1:
            continue
        comp = frontier = 1 << v
        while frontier:
            reach = 0
            for u in iter_bits(frontier):
                reach |= g.adjacency[u]
            frontier = reach & ~comp
            comp |= frontier
        seen |= comp
        found.append(bits_to_set(comp))
    return found


def is_connected_mask(g: Graph, mask: int) -> bool:
    if not mask:
        return False
    comp = frontier = mask & -mask
    while frontier:
        reach = 0
        for u in iter_bits(frontier):
            reach |= g.adjacency[u]
        frontier = reach & mask & ~comp
        comp |= frontier
    return comp == mask


def odd_components(g: Graph) -> int:
    return sum(1 for comp in components(g) if len(comp) % 2)


def is_forest(g: Graph) -> bool:
    return g.edge_count == g.n - len(components(g))


def vertex_cover_number(g: Graph, budget: int | None = None) -> int:
    """Exact tau(g): smallest vertex set whose removal leaves no edge."""
    budget = BUDGETS['vertex_cover'] if budget is None else budget
    if g.n > budget:
        raise BudgetExceeded("vertex_cover_number", g.n, budget)
    if g.edge_count == 0:
        return 0

    # isolated vertices never help a cover
    active = [v for v in range(g.n) if g.adjacency[v]]
    edges = g.edges()
    for size in range(1, len(active) + 1):
        for cover in combinations(active, size):
            mask = set_to_bits(cover)
            if all(mask >> u & 1 or mask >> v & 1 for u, v in edges):
                return size
    return len(active)


def induced_subgraph(g: Graph, vertices: Iterable[int]) -> tuple[Graph, list[int]]:
    """Subgraph induced on ``vertices``, plus the map from new labels back to g."""
    index = sorted(set(vertices))
    for v in index:
        if not 0 <= v < g.n:
            raise InvalidGraphError(f"vertex {v} is not in a graph on {g.n} vertices")
    position = {v: i for i, v in enumerate(index)}
    rows = []
    for v in index:
        rows.append(set_to_bits(position[u] for u in iter_bits(g.adjacency[v]) if u in position))
    return Graph(len(index), tuple(rows)), index


def density(g: Graph) -> Fraction:
    if g.n == 0:
        raise InvalidGraphError("density of the null graph is undefined")
    return Fraction(g.edge_count, g.n)


def density_prime(g: Graph) -> Fraction:
    if g.n < 2:
        raise InvalidGraphError("e/(v-1) needs at least two vertices")
    return Fraction(g.edge_count, g.n - 1)


def to_networkx(g: Graph) -> nx.Graph:
    nxg = nx.Graph()
    nxg.add_nodes_from(range(g.n))
    nxg.add_edges_from(g.edges())
    return nxg


# ---------------------------------------------------------------- text format

def format_graph(g: Graph) -> str:
    edges = g.edges()
    lines = [f"{g.n} {len(edges)}"]
    lines.extend(f"{u} {v}" for u, v in edges)
    return "\n".join(lines) + "\n"


def parse_graph(text: str) -> Graph:
    rows = [line.split() for line in text.splitlines() if line.strip()]
    if not rows:
        raise GraphFormatError("empty graph file")
    try:
        header = [int(tok) for tok in rows[0]]
        body = [[int(tok) for tok in row] for row in rows[1:]]
    except ValueError as err:
        raise GraphFormatError(f"non-integer token: {err}") from None
    if len(header) != 2:
        raise GraphFormatError(f"header must be 'n m', got {rows[0]}")
    n, m = header
    if n < 0 or m < 0:
        raise GraphFormatError(f"negative header values: n={n}, m={m}")
    if len(body) != m:
        raise GraphFormatError(f"header announces {m} edges, found {len(body)}")

    seen = set()
    for lineno, row in enumerate(body, start=2):
        if len(row) != 2:
            raise GraphFormatError(f"line {lineno}: expected 'u v', got {row}")
        u, v = row
        if u == v:
            raise GraphFormatError(f"line {lineno}: self-loop at {u}")
        if not 0 <= u < v < n:
            raise GraphFormatError(f"line {lineno}: need 0 <= u < v < {n}, got {u} {v}")
        if (u, v) in seen:
            raise GraphFormatError(f"line {lineno}: duplicate edge {u} {v}")
        seen.add((u, v))
    return Graph.from_edges(n, seen)


def read_graph(path: str | Path) -> Graph:
    log.debug(f"reading graph from {path}")
    return parse_graph(Path(path).read_text())


def write_graph(g: Graph, path: str | Path) -> None:
    Path(path).write_text(format_graph(g))


# ------------------------------------------------------------- graph families

FAMILY_KINDS = ("complete", "cycle", "union", "barK", "glued")


@dataclass(frozen=True)
class GraphFamilySpec:
    kind: str
    params: tuple[int, ...] = ()
    parts: tuple["GraphFamilySpec", ...] = ()

    def __post_init__(self):
        if self.kind not in FAMILY_KINDS:
            raise InvalidGraphError(f"unknown graph family {self.kind!r}")
        if self.kind == "complete" and (len(self.params) != 1 or self.params[0] < 1):
            raise InvalidGraphError(f"K_t needs t >= 1, got {self.params}")
        if self.kind == "cycle" and (len(self.params) != 1 or self.params[0] < 3):
            raise InvalidGraphError(f"C_k needs k >= 3, got {self.params}")
        if self.kind == "barK" and (len(self.params) != 2 or not 0 <= self.params[0] <= self.params[1]):
            raise InvalidGraphError(f"barK needs 0 <= t <= n, got {self.params}")
        if self.kind == "glued" and (len(self.params) != 1 or self.params[0] < 1 or len(self.parts) != 1):
            raise InvalidGraphError("glue needs one base graph and k >= 1")

    def build(self) -> Graph:
        if self.kind == "complete":
            return make_complete(self.params[0])
        if self.kind == "cycle":
            return make_cycle(self.params[0])
        if self.kind == "barK":
            return make_barK(*self.params)
        if self.kind == "glued":
            return glue_at_vertex(self.parts[0].build(), self.params[0])
        return disjoint_union([part.build() for part in self.parts])

    def flat_parts(self) -> list["GraphFamilySpec"]:
        if self.kind != "union":
            return [self]
        return [leaf for part in self.parts for leaf in part.flat_parts()]

    def encode(self) -> str:
        """Canonical text; unions are order-insensitive."""
        if self.kind == "complete":
            return f"K{self.params[0]}"
        if self.kind == "cycle":
            return f"C{self.params[0]}"
        if self.kind == "barK":
            return f"barK({self.params[0]},{self.params[1]})"
        if self.kind == "glued":
            return f"glue({self.parts[0].encode()},{self.params[0]})"
        codes = sorted(part.encode() for part in self.flat_parts())
        if not codes:
            return "null"
        grouped = []
        for code in dict.fromkeys(codes):
            count = codes.count(code)
            grouped.append(f"{count}{code}" if count > 1 else code)
        return "+".join(grouped)


_TOKEN = re.compile(r"\s*(barK|glue|null|K|C|\d+|[(),+])")


def _tokenize(expr: str) -> list[str]:
    tokens, pos = [], 0
    expr = expr.strip()
    while pos < len(expr):
        match = _TOKEN.match(expr, pos)
        if not match:
            raise GraphFormatError(f"cannot parse family expression at {expr[pos:]!r}")
        tokens.append(match.group(1))
        pos = match.end()
    return tokens


def parse_family(expr: str) -> GraphFamilySpec:
    """Parse expressions such as ``K4``, ``2C3+C4``, ``barK(3,5)``, ``glue(C4,3)``."""
    tokens = _tokenize(expr)
    pos = 0

    def peek():
        return tokens[pos] if pos < len(tokens) else None

    def take(expected=None):
        nonlocal pos
        tok = peek()
        if tok is None or (expected is not None and tok != expected):
            raise GraphFormatError(f"expected {expected or 'token'} in {expr!r}, got {tok!r}")
        pos += 1
        return tok

    def number():
        tok = take()
        if not tok.isdigit():
            raise GraphFormatError(f"expected an integer in {expr!r}, got {tok!r}")
        return int(tok)

    def atom():
        tok = take()
        if tok == "K":
            return GraphFamilySpec("complete", (number(),))
        if tok == "C":
            return GraphFamilySpec("cycle", (number(),))
        if tok == "null":
            return GraphFamilySpec("union")
        if tok == "barK":
            take("(")
            t = number()
            take(",")
            n = number()
            take(")")
            return GraphFamilySpec("barK", (t, n))
        if tok == "glue":
            take("(")
            base = union()
            take(",")
            k = number()
            take(")")
            return GraphFamilySpec("glued", (k,), (base,))
        raise GraphFormatError(f"unexpected {tok!r} in {expr!r}")

    def term():
        count = number() if peek() is not None and peek().isdigit() else 1
        if count < 1:
            raise GraphFormatError(f"multiplier must be positive in {expr!r}")
        base = atom()
        return [base] * count

    def union():
        parts = term()
        while peek() == "+":
            take("+")
            parts.extend(term())
        if len(parts) == 1:
            return parts[0]
        return GraphFamilySpec("union", parts=tuple(parts))

    try:
        spec = union()
    except InvalidGraphError as err:
        raise GraphFormatError(str(err)) from None
    if pos != len(tokens):
        raise GraphFormatError(f"trailing input in {expr!r}")
    return spec
