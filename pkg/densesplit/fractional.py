"""Exact-rational points of [0,1]^V(G) and the potentials driving the splitter.

Everything here is ``Fraction`` arithmetic; the branch decisions downstream are
strict inequalities and must not see rounding.
"""
from __future__ import annotations

import logging
import math
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .errors import GraphFormatError, InvalidGraphError
from .graph_core import Graph, iter_bits, set_to_bits

log = logging.getLogger(__name__)

HALF = Fraction(1, 2)

_RATIONAL = re.compile(r"^\s*([+-]?\d+)(?:\s*/\s*(\d+))?\s*$")


def parse_rational(text: str) -> Fraction:
    """Accept ``p/q`` or an integer; decimals are rejected to keep inputs exact."""
    match = _RATIONAL.match(str(text))
    if not match:
        raise GraphFormatError(f"expected a rational 'p/q' or an integer, got {text!r}")
    numerator, denominator = match.group(1), match.group(2)
    if denominator is not None and int(denominator) == 0:
        raise GraphFormatError(f"zero denominator in {text!r}")
    return Fraction(int(numerator), int(denominator or 1))


def format_rational(value: Fraction) -> str:
    return f"{value.numerator}/{value.denominator}"


@dataclass(frozen=True)
class SplitParams:
    s: Fraction
    t: Fraction

    def __post_init__(self):
        object.__setattr__(self, "s", Fraction(self.s))
        object.__setattr__(self, "t", Fraction(self.t))
        if self.s < 1 or self.t < 1:
            raise InvalidGraphError(f"s and t must be at least 1, got s={self.s}, t={self.t}")

    @property
    def total(self) -> Fraction:
        return self.s + self.t + 1

    def swapped(self) -> "SplitParams":
        return SplitParams(self.t, self.s)

    def to_json(self) -> dict:
        return {"s": format_rational(self.s), "t": format_rational(self.t)}


@dataclass(frozen=True)
class FracVector:
    entries: tuple[Fraction, ...]
    host: Graph

    def __post_init__(self):
        entries = tuple(Fraction(x) for x in self.entries)
        if len(entries) != self.host.n:
            raise InvalidGraphError(f"vector has {len(entries)} entries for a graph on {self.host.n} vertices")
        for i, x in enumerate(entries):
            if not 0 <= x <= 1:
                raise InvalidGraphError(f"entry {i} = {x} is outside [0, 1]")
        object.__setattr__(self, "entries", entries)

    @classmethod
    def constant(cls, host: Graph, value) -> "FracVector":
        return cls((Fraction(value),) * host.n, host)

    def __getitem__(self, i: int) -> Fraction:
        return self.entries[i]

    def __len__(self) -> int:
        return len(self.entries)

    def norm1(self) -> Fraction:
        return sum(self.entries, Fraction(0))

    def complement(self) -> "FracVector":
        return FracVector(tuple(1 - x for x in self.entries), self.host)

    def replace(self, updates: dict[int, Fraction]) -> "FracVector":
        entries = list(self.entries)
        for i, x in updates.items():
            entries[i] = Fraction(x)
        return FracVector(tuple(entries), self.host)

    def support(self, value) -> frozenset[int]:
        return frozenset(i for i, x in enumerate(self.entries) if x == value)

    def to_json(self) -> list[str]:
        return [format_rational(x) for x in self.entries]


def _check_host(g: Graph, x: FracVector) -> None:
    if x.host != g:
        raise InvalidGraphError("vector does not live over this graph")


def quad_edge_sum(g: Graph, x: FracVector) -> Fraction:
    """e(x) = sum over edges ij of x_i x_j."""
    _check_host(g, x)
    return sum((x[u] * x[v] for u, v in g.edges()), Fraction(0))


def f_potential(g: Graph, x: FracVector, p: SplitParams) -> Fraction:
    return quad_edge_sum(g, x) - (p.s + HALF) * x.norm1()


def g_potential(g: Graph, x: FracVector, p: SplitParams) -> Fraction:
    y = x.complement()
    return quad_edge_sum(g, y) - (p.t + HALF) * y.norm1()


@dataclass(frozen=True)
class BalanceReport:
    f_value: Fraction
    g_value: Fraction
    f_bound: Fraction
    g_bound: Fraction
    mass: Fraction
    co_mass: Fraction
    f_ok: bool
    g_ok: bool
    mass_ok: bool
    co_mass_ok: bool

    @property
    def balanced(self) -> bool:
        return self.f_ok and self.g_ok and self.mass_ok and self.co_mass_ok

    def __bool__(self) -> bool:
        return self.balanced

    def failed(self) -> list[str]:
        names = ("f", "g", "mass", "co_mass")
        flags = (self.f_ok, self.g_ok, self.mass_ok, self.co_mass_ok)
        return [name for name, ok in zip(names, flags) if not ok]


def is_balanced(g: Graph, x: FracVector, p: SplitParams) -> BalanceReport:
    f_value = f_potential(g, x, p)
    g_value = g_potential(g, x, p)
    f_bound = -(p.s + HALF) ** 2 / p.total
    g_bound = -(p.t + HALF) ** 2 / p.total
    mass = x.norm1()
    co_mass = g.n - mass
    return BalanceReport(
        f_value=f_value,
        g_value=g_value,
        f_bound=f_bound,
        g_bound=g_bound,
        mass=mass,
        co_mass=co_mass,
        f_ok=f_value > f_bound,
        g_ok=g_value > g_bound,
        mass_ok=mass >= p.s + 1,
        co_mass_ok=co_mass >= p.t + 1,
    )


def fractional_support(x: FracVector) -> frozenset[int]:
    return frozenset(i for i, v in enumerate(x.entries) if 0 < v < 1)


@dataclass(frozen=True)
class CliqueRoundState:
    """Bookkeeping frozen at entry to the clique stage.

    ``A``/``B`` hold the coordinates at 1/0, ``C`` the fractional clique,
    ``q`` the mass on C and ``r`` its floor. In the swapped frame (x -> 1-x)
    ``r`` becomes c-r-1 so that fbar and gbar trade places exactly.
    """

    A: frozenset[int]
    B: frozenset[int]
    C: frozenset[int]
    q: Fraction
    r: int
    swapped: bool = False

    @property
    def a(self) -> int:
        return len(self.A)

    @property
    def b(self) -> int:
        return len(self.B)

    @property
    def c(self) -> int:
        return len(self.C)

    @classmethod
    def from_vector(cls, g: Graph, y: FracVector) -> "CliqueRoundState":
        _check_host(g, y)
        clique = fractional_support(y)
        q = sum((y[i] for i in clique), Fraction(0))
        return cls(A=y.support(1), B=y.support(0), C=clique, q=q, r=math.floor(q))

    def check(self, g: Graph) -> None:
        if self.A & self.B or self.A & self.C or self.B & self.C:
            raise InvalidGraphError("A, B, C must be pairwise disjoint")
        if self.A | self.B | self.C != frozenset(range(g.n)):
            raise InvalidGraphError("A, B, C must cover the vertex set")
        for i in self.C:
            if (g.adjacency[i] | 1 << i) & set_to_bits(self.C) != set_to_bits(self.C):
                raise InvalidGraphError(f"C is not a clique (vertex {i})")
        if not 0 <= self.q <= self.c:
            raise InvalidGraphError(f"q = {self.q} outside [0, {self.c}]")
        floor_q = math.floor(self.q)
        if not self.swapped and self.r != floor_q:
            raise InvalidGraphError(f"r = {self.r} is not floor(q) = {floor_q}")
        if self.swapped and self.c - self.r - 1 != math.floor(self.c - self.q):
            raise InvalidGraphError("swapped state does not mirror an unswapped one")

    def swap(self) -> "CliqueRoundState":
        return CliqueRoundState(
            A=self.B,
            B=self.A,
            C=self.C,
            q=self.c - self.q,
            r=self.c - self.r - 1,
            swapped=not self.swapped,
        )

    def to_json(self) -> dict:
        return {
            "A": sorted(self.A),
            "B": sorted(self.B),
            "C": sorted(self.C),
            "q": format_rational(self.q),
            "r": self.r,
            "swapped": self.swapped,
        }


def _clique_pair_sum(values: Sequence[Fraction]) -> Fraction:
    total = sum(values, Fraction(0))
    squares = sum((v * v for v in values), Fraction(0))
    return (total * total - squares) / 2


def _check_state(g: Graph, state: CliqueRoundState) -> None:
    if any(not 0 <= i < g.n for i in state.C):
        raise InvalidGraphError("clique state refers to vertices outside the graph")
    if state.A | state.B | state.C != frozenset(range(g.n)):
        raise InvalidGraphError("clique state does not cover the vertex set")


def fbar_potential(g: Graph, x: FracVector, state: CliqueRoundState, p: SplitParams) -> Fraction:
    """f with the clique-quadratic term swapped for its affine upper bound."""
    _check_host(g, x)
    _check_state(g, state)
    on_clique = [x[i] for i in sorted(state.C)]
    r = state.r
    return (
        r * sum(on_clique, Fraction(0))
        - Fraction(r * (r + 1), 2)
        - _clique_pair_sum(on_clique)
        + quad_edge_sum(g, x)
        - p.s * x.norm1()
    )


def gbar_potential(g: Graph, x: FracVector, state: CliqueRoundState, p: SplitParams) -> Fraction:
    _check_host(g, x)
    _check_state(g, state)
    y = x.complement()
    on_clique = [y[i] for i in sorted(state.C)]
    k = state.c - state.r - 1
    return (
        k * sum(on_clique, Fraction(0))
        - Fraction((state.c - state.r) * k, 2)
        - _clique_pair_sum(on_clique)
        + quad_edge_sum(g, y)
        - p.t * y.norm1()
    )


def clique_coefficients(
    g: Graph, x: FracVector, state: CliqueRoundState, p: SplitParams
) -> dict[int, tuple[Fraction, Fraction]]:
    """Slopes of fbar and gbar in each clique coordinate x_i.

    Both potentials are jointly affine on C once the coordinates outside C are
    fixed, so these slopes describe them exactly on the clique face.
    """
    _check_host(g, x)
    out = {}
    k = state.c - state.r - 1
    clique_mask = set_to_bits(state.C)
    for i in sorted(state.C):
        outside = list(iter_bits(g.adjacency[i] & ~clique_mask))
        alpha = state.r + sum((x[j] for j in outside), Fraction(0)) - p.s
        beta = k + sum((1 - x[j] for j in outside), Fraction(0)) - p.t
        out[i] = (alpha, -beta)
    return out
