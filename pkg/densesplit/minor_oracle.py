"""Exact minor containment, circumference and cycle packing for small graphs.

These are the ground-truth oracles for the extremal checks, so budgets are hard
errors: a search that would not finish is refused rather than truncated.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Iterator

from .errors import BudgetExceeded, InvalidGraphError
from .graph_core import Graph, is_connected_mask, is_forest, iter_bits, set_to_bits, vertex_cover_number
from .settings import BUDGETS

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class MinorEmbedding:
    """``branch_sets[u]`` is the bitmask of G-vertices representing H-vertex u."""

    branch_sets: tuple[int, ...]

    def sets(self) -> list[frozenset[int]]:
        return [frozenset(iter_bits(mask)) for mask in self.branch_sets]

    def validate(self, g: Graph, h: Graph) -> bool:
        if len(self.branch_sets) != h.n:
            return False
        used = 0
        for mask in self.branch_sets:
            if not mask or mask & used or mask & ~g.vertex_mask:
                return False
            if not is_connected_mask(g, mask):
                return False
            used |= mask
        for u, v in h.edges():
            if not _touches(g, self.branch_sets[u], self.branch_sets[v]):
                return False
        return True

    def to_json(self) -> dict[str, list[int]]:
        return {str(u): sorted(part) for u, part in enumerate(self.sets())}


def _touches(g: Graph, mask_a: int, mask_b: int) -> bool:
    return bool(_neighbourhood(g, mask_a) & mask_b)


def _neighbourhood(g: Graph, mask: int) -> int:
    reach = 0
    for v in iter_bits(mask):
        reach |= g.adjacency[v]
    return reach & ~mask


def connected_subsets(g: Graph, allowed: int) -> Iterator[int]:
    """Every connected vertex subset inside ``allowed``, each exactly once.

    Enumerates by smallest member v and only grows through vertices above v,
    extending with neighbours that are new to the closed neighbourhood.
    """

    def grow(current: int, extension: int, closed: int, above: int) -> Iterator[int]:
        yield current
        while extension:
            bit = extension & -extension
            extension ^= bit
            w = bit.bit_length() - 1
            fresh = g.adjacency[w] & above & ~closed
            yield from grow(current | bit, extension | fresh, closed | g.adjacency[w] | bit, above)

    for v in iter_bits(allowed):
        above = allowed & ~((1 << (v + 1)) - 1)
        start = 1 << v
        yield from grow(start, g.adjacency[v] & above, start | g.adjacency[v], above)


def _check_minor_budget(g: Graph, h: Graph, budget: int | None) -> None:
    limit = BUDGETS['minor'] if budget is None else budget
    if g.n <= limit:
        return
    if g.n <= BUDGETS['minor_small_h_graph'] and h.n <= BUDGETS['minor_small_h']:
        return
    raise BudgetExceeded("has_minor", g.n, limit)


def _excluded_by_invariants(g: Graph, h: Graph) -> str | None:
    """Minor-monotone parameters that already rule the minor out."""
    if h.n > g.n:
        return "h has more vertices"
    if h.edge_count > g.edge_count:
        return "h has more edges"
    if is_forest(g) and not is_forest(h):
        return "g is a forest and h has a cycle"
    if g.n <= 16 and vertex_cover_number(h) > vertex_cover_number(g):
        return "h has the larger vertex cover number"
    return None


def _placement_order(h: Graph) -> list[int]:
    order: list[int] = []
    placed = 0
    remaining = set(range(h.n))
    while remaining:
        u = max(remaining, key=lambda v: ((h.adjacency[v] & placed).bit_count(), h.degree(v), -v))
        order.append(u)
        placed |= 1 << u
        remaining.discard(u)
    return order


def has_minor(g: Graph, h: Graph, budget: int | None = None) -> MinorEmbedding | None:
    """An embedding of h as a minor of g, or None when there is none."""
    _check_minor_budget(g, h, budget)
    if h.n == 0:
        return MinorEmbedding(())
    reason = _excluded_by_invariants(g, h)
    if reason:
        log.debug(f"no minor: {reason}")
        return None

    order = _placement_order(h)
    sets = [0] * h.n
    placed = 0

    def room_for_neighbours(free: int, assigned: int) -> bool:
        # each unplaced h-neighbour of a placed vertex needs its own free g-vertex next to it
        for w in iter_bits(assigned):
            waiting = (h.adjacency[w] & ~assigned).bit_count()
            if waiting and (_neighbourhood(g, sets[w]) & free).bit_count() < waiting:
                return False
        return True

    def extend(k: int, used: int) -> bool:
        nonlocal placed
        if k == len(order):
            return True
        u = order[k]
        free = g.vertex_mask & ~used
        left = len(order) - k
        if free.bit_count() < left:
            return False
        largest = free.bit_count() - (left - 1)
        anchors = [sets[w] for w in iter_bits(h.adjacency[u] & placed)]
        needs = [_neighbourhood(g, mask) for mask in anchors]

        candidates = [
            mask
            for mask in connected_subsets(g, free)
            if mask.bit_count() <= largest and all(mask & need for need in needs)
        ]
        candidates.sort(key=lambda mask: (mask.bit_count(), mask))
        for mask in candidates:
            sets[u] = mask
            placed |= 1 << u
            if room_for_neighbours(free & ~mask, placed) and extend(k + 1, used | mask):
                return True
            placed &= ~(1 << u)
            sets[u] = 0
        return False

    if not extend(0, 0):
        return None
    embedding = MinorEmbedding(tuple(sets))
    if not embedding.validate(g, h):
        raise InvalidGraphError("minor search produced an invalid embedding")
    return embedding


def circumference(g: Graph, budget: int | None = None) -> int:
    """Length of a longest cycle, 0 for forests."""
    budget = BUDGETS['cycles'] if budget is None else budget
    if g.n > budget:
        raise BudgetExceeded("circumference", g.n, budget)
    if is_forest(g):
        return 0

    best = 0
    for start in range(g.n):
        # cycles whose smallest vertex is start; paths grow through larger vertices only
        allowed = g.vertex_mask & ~((1 << start) - 1)
        if (allowed.bit_count()) <= best:
            break
        layer = {1 << start: 1 << start}
        size = 1
        while layer:
            grown: dict[int, int] = {}
            for mask, ends in layer.items():
                if size >= 3 and _neighbourhood(g, ends) >> start & 1:
                    best = max(best, size)
                for v in iter_bits(ends):
                    for w in iter_bits(g.adjacency[v] & allowed & ~mask):
                        key = mask | 1 << w
                        grown[key] = grown.get(key, 0) | 1 << w
            layer = grown
            size += 1
        if best == g.n:
            break
    return best


def chordless_cycles(g: Graph) -> list[int]:
    """Vertex masks of induced cycles; every cycle contains the vertex set of one."""
    found = []

    def grow(current: int, extension: int, closed: int, above: int) -> None:
        # induced degrees only grow, so a vertex of degree three ends the branch
        if any((g.adjacency[v] & current).bit_count() > 2 for v in iter_bits(current)):
            return
        if current.bit_count() >= 3 and all((g.adjacency[v] & current).bit_count() == 2 for v in iter_bits(current)):
            found.append(current)
            return
        while extension:
            bit = extension & -extension
            extension ^= bit
            w = bit.bit_length() - 1
            fresh = g.adjacency[w] & above & ~closed
            grow(current | bit, extension | fresh, closed | g.adjacency[w] | bit, above)

    for v in range(g.n):
        above = g.vertex_mask & ~((1 << (v + 1)) - 1)
        start = 1 << v
        grow(start, g.adjacency[v] & above, start | g.adjacency[v], above)
    return found


def max_disjoint_cycles(g: Graph, budget: int | None = None) -> int:
    """Largest k such that g has k vertex-disjoint cycles (equivalently a kC3 minor)."""
    budget = BUDGETS['cycles'] if budget is None else budget
    if g.n > budget:
        raise BudgetExceeded("max_disjoint_cycles", g.n, budget)
    cycles = chordless_cycles(g)
    if not cycles:
        return 0
    by_vertex: dict[int, list[int]] = {}
    for mask in cycles:
        by_vertex.setdefault((mask & -mask).bit_length() - 1, []).append(mask)

    memo: dict[int, int] = {}

    def best(available: int) -> int:
        if available.bit_count() < 3:
            return 0
        if available in memo:
            return memo[available]
        low = available & -available
        v = low.bit_length() - 1
        result = best(available & ~low)
        for mask in by_vertex.get(v, ()):
            if mask & ~available == 0:
                result = max(result, 1 + best(available & ~mask))
        memo[available] = result
        return result

    # every cycle's lowest vertex is where the packing search can pick it
    return best(set_to_bits(v for mask in cycles for v in iter_bits(mask)))
