"""Finite-n extremal numbers for minors and the bounds they are checked against.

``ex_minor(n, h)`` is the largest edge count of an n-vertex graph with no
h-minor. Up to ``BUDGETS['ex_labeled']`` vertices every labeled graph is
visited, sharded by the row of vertex 0; above that the h-minor-free
isomorphism classes are grown one edge at a time, which is exact because
h-minor-freeness is closed under deleting edges.
"""
from __future__ import annotations

import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, repeat
from typing import Sequence

import networkx as nx
import pandas as pd

from ..errors import BudgetExceeded, InternalProofGap, InvalidGraphError
from ..graph_core import (
    Graph,
    GraphFamilySpec,
    format_graph,
    make_barK,
    make_empty,
    parse_family,
    parse_graph,
    to_networkx,
    vertex_cover_number,
)
from ..minor_oracle import has_minor
from ..settings import BUDGETS, PROBES
from .calcs import make_report

log = logging.getLogger(__name__)

PatternLike = GraphFamilySpec | Graph | str


@dataclass(frozen=True)
class ExtremalRecord:
    n: int
    h_spec: GraphFamilySpec | None
    ex_value: int
    witness: Graph
    runtime_ms: int = field(default=0, compare=False)
    pattern: Graph | None = field(default=None, compare=False)

    @property
    def h_code(self) -> str:
        if self.h_spec is not None:
            return self.h_spec.encode()
        edges = ",".join(f"{u}-{v}" for u, v in self.pattern.edges())
        return f"graph({self.pattern.n};{edges})"

    @property
    def key(self) -> tuple[int, str]:
        return self.n, self.h_code

    def to_json(self) -> dict:
        pattern = self.pattern if self.pattern is not None else self.h_spec.build()
        return {
            "n": self.n,
            "h": self.h_code,
            "ex": self.ex_value,
            "witness": format_graph(self.witness),
            "pattern": format_graph(pattern),
            "runtime_ms": self.runtime_ms,
        }

    @classmethod
    def from_json(cls, data: dict) -> "ExtremalRecord":
        code = data["h"]
        spec = None if code.startswith("graph(") else parse_family(code)
        return cls(
            n=int(data["n"]),
            h_spec=spec,
            ex_value=int(data["ex"]),
            witness=parse_graph(data["witness"]),
            runtime_ms=int(data.get("runtime_ms", 0)),
            pattern=parse_graph(data["pattern"]),
        )


def resolve_pattern(h: PatternLike) -> tuple[GraphFamilySpec | None, Graph]:
    if isinstance(h, str):
        h = parse_family(h)
    if isinstance(h, GraphFamilySpec):
        return h, h.build()
    return None, h


# ------------------------------------------------------------- ex_m(n, H)

def _best_in_shard(n: int, pattern: Graph, prefix: int) -> Graph | None:
    """Densest h-minor-free graph whose vertex-0 row is ``prefix``, first found wins."""
    pairs = list(combinations(range(n), 2))
    lead = n - 1
    fixed = [pairs[i] for i in range(lead) if prefix >> i & 1]
    free = pairs[lead:]
    for extra in range(len(free), -1, -1):
        for chosen in combinations(range(len(free)), extra):
            g = Graph.from_edges(n, fixed + [free[i] for i in chosen])
            if has_minor(g, pattern) is None:
                return g
    return None


def _ex_labeled(n: int, pattern: Graph, jobs: int) -> Graph:
    if n < 2:
        return make_empty(n)
    shards = range(1 << (n - 1))
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            found = list(pool.map(_best_in_shard, repeat(n), repeat(pattern), shards))
    else:
        found = [_best_in_shard(n, pattern, prefix) for prefix in shards]

    # merge in shard order so the witness does not depend on the job count
    best = None
    for g in found:
        if g is not None and (best is None or g.edge_count > best.edge_count):
            best = g
    log.debug(f"labeled search on n={n}: {len(found)} shards, best e={best.edge_count}")
    return best


def _class_key(nxg: nx.Graph) -> tuple:
    degrees = tuple(sorted(d for _, d in nxg.degree()))
    return degrees, nx.weisfeiler_lehman_graph_hash(nxg)


def _is_minor_free(candidate: Graph, pattern: Graph) -> bool:
    return has_minor(candidate, pattern) is None


def _ex_classes(n: int, pattern: Graph, jobs: int = 1) -> Graph:
    level = [make_empty(n)]
    best = level[0]
    pool = ProcessPoolExecutor(max_workers=jobs) if jobs > 1 else None
    try:
        while level:
            best = level[0]
            buckets: dict[tuple, list[nx.Graph]] = {}
            candidates = []
            for g in level:
                for u, v in combinations(range(n), 2):
                    if g.has_edge(u, v):
                        continue
                    candidate = g.add_edge(u, v)
                    nxg = to_networkx(candidate)
                    reps = buckets.setdefault(_class_key(nxg), [])
                    if any(nx.is_isomorphic(rep, nxg) for rep in reps):
                        continue
                    reps.append(nxg)
                    candidates.append(candidate)

            # map keeps candidate order, so the witness does not depend on the job count
            if pool is not None:
                free = list(pool.map(_is_minor_free, candidates, repeat(pattern), chunksize=8))
            else:
                free = [_is_minor_free(candidate, pattern) for candidate in candidates]
            level = [candidate for candidate, ok in zip(candidates, free) if ok]
            log.debug(
                f"n={n}: {len(level)}/{len(candidates)} classes with {best.edge_count + 1} edges are minor-free"
            )
    finally:
        if pool is not None:
            pool.shutdown()
    return best


def ex_minor(n: int, h: PatternLike, jobs: int = 1, budget: int | None = None, method: str | None = None) -> ExtremalRecord:
    spec, pattern = resolve_pattern(h)
    limit = BUDGETS['ex_max'] if budget is None else budget
    if n > limit:
        raise BudgetExceeded("ex_minor", n, limit)
    if n < 0:
        raise InvalidGraphError(f"vertex count must be nonnegative, got {n}")
    if pattern.edge_count == 0 and pattern.n <= n:
        raise InvalidGraphError("every graph on n vertices contains an edgeless pattern")

    method = method or ("labeled" if n <= BUDGETS['ex_labeled'] else "classes")
    started = time.perf_counter()
    if method == "labeled":
        witness = _ex_labeled(n, pattern, jobs)
    elif method == "classes":
        witness = _ex_classes(n, pattern, jobs)
    else:
        raise InvalidGraphError(f"unknown enumeration method {method!r}")
    runtime_ms = int((time.perf_counter() - started) * 1000)

    record = ExtremalRecord(n, spec, witness.edge_count, witness, runtime_ms, pattern)
    log.info(f"ex_m({n}, {record.h_code}) = {record.ex_value} in {runtime_ms} ms")
    return record


def validate_record(record: ExtremalRecord) -> list[str]:
    """Witness has the recorded size, avoids h, and every added edge creates h."""
    pattern = record.pattern if record.pattern is not None else record.h_spec.build()
    witness = record.witness
    problems = []
    if witness.n != record.n:
        problems.append(f"witness has {witness.n} vertices, expected {record.n}")
    if witness.edge_count != record.ex_value:
        problems.append(f"witness has {witness.edge_count} edges, expected {record.ex_value}")
    if has_minor(witness, pattern) is not None:
        problems.append("witness contains the pattern as a minor")
    for u, v in combinations(range(witness.n), 2):
        if not witness.has_edge(u, v) and has_minor(witness.add_edge(u, v), pattern) is None:
            problems.append(f"adding {u}-{v} keeps the witness minor-free")
            break
    return problems


# ---------------------------------------------------------- known values

def _is_cycle(spec: GraphFamilySpec) -> bool:
    return spec.kind == "cycle"


def known_extremal_constant(spec: GraphFamilySpec | str) -> Fraction | None:
    if isinstance(spec, str):
        spec = parse_family(spec)
    parts = spec.flat_parts()
    if not parts:
        return None
    if all(_is_cycle(part) for part in parts):
        lengths = [part.params[0] for part in parts]
        if len(lengths) == 1:
            return Fraction(lengths[0] - 1, 2)
        if all(k % 2 for k in lengths):
            return Fraction(sum(lengths) + len(lengths), 2) - 1
        return None
    if all(part.kind == "complete" for part in parts):
        sizes = {part.params[0] for part in parts}
        if len(sizes) == 1 and 3 <= (t := sizes.pop()) <= 9:
            k = len(parts)
            return Fraction(k * t - k - 1)
    return None


def cycle_union_bound(spec: GraphFamilySpec) -> Fraction | None:
    """(v + comp)/2 - 1 for disjoint unions of cycles."""
    parts = spec.flat_parts()
    if not parts or not all(_is_cycle(part) for part in parts):
        return None
    return Fraction(sum(part.params[0] for part in parts) + len(parts), 2) - 1


def _two_connected_constant(part: GraphFamilySpec) -> Fraction | None:
    if part.kind == "cycle" or (part.kind == "complete" and part.params[0] >= 3):
        return known_extremal_constant(part)
    return None


def union_upper_bound(parts: Sequence[GraphFamilySpec]) -> Fraction | None:
    union = parts[0] if len(parts) == 1 else GraphFamilySpec("union", parts=tuple(parts))
    bounds = []
    constants = [_two_connected_constant(part) for part in parts]
    if all(c is not None for c in constants):
        bounds.append(sum(constants, Fraction(0)) + len(parts) - 1)
    cycle_bound = cycle_union_bound(union)
    if cycle_bound is not None:
        bounds.append(cycle_bound)
    return min(bounds) if bounds else None


# --------------------------------------------------------- lower bounds

def construction_edges(t: int, n: int) -> int:
    return n * t - t * (t + 1) // 2


def density_supremum_lower_bound(h: PatternLike, n_max: int, spot_n: int | None = None) -> Fraction:
    """max over n <= n_max of e(barK(tau-1, n))/n, with the construction checked minor-free on small n."""
    spec, pattern = resolve_pattern(h)
    if pattern.edge_count == 0:
        raise InvalidGraphError("the pattern needs at least one edge")
    t = vertex_cover_number(pattern) - 1
    start = max(t, 1)
    best = Fraction(0)
    for n in range(start, n_max + 1):
        best = max(best, Fraction(construction_edges(t, n), n))

    spot = min(n_max, PROBES['lower_bound_spot_n'] if spot_n is None else spot_n)
    for n in range(start, spot + 1):
        if has_minor(make_barK(t, n), pattern) is not None:
            log.error(f"barK({t},{n}) contains the pattern")
            raise InternalProofGap(f"barK({t},{n}) contains the pattern as a minor")
    return best


def check_lower_bound(patterns: Sequence[PatternLike], n_max: int, budget: int | None = None) -> pd.DataFrame:
    rows = []
    for h in patterns:
        spec, pattern = resolve_pattern(h)
        code = spec.encode() if spec is not None else "graph"
        t = vertex_cover_number(pattern) - 1
        for n in range(max(t, 1), n_max + 1):
            g = make_barK(t, n)
            formula_ok = g.edge_count == construction_edges(t, n)
            minor_free = has_minor(g, pattern, budget=budget) is None
            rows.append(
                {
                    "h": code,
                    "n": n,
                    "t": t,
                    "edges": g.edge_count,
                    "ratio": Fraction(g.edge_count, n),
                    "formula_ok": formula_ok,
                    "minor_free": minor_free,
                    "ok": formula_ok and minor_free,
                }
            )
    return make_report(rows)


def verify_union_bound(
    h_parts: Sequence[GraphFamilySpec | str], n_max: int, jobs: int = 1, budget: int | None = None
) -> pd.DataFrame:
    """ex_m(n, H)/n against the union and cycle bounds, and ex_m against the barK construction."""
    parts = [parse_family(part) if isinstance(part, str) else part for part in h_parts]
    parts = [leaf for part in parts for leaf in part.flat_parts()]
    if not parts:
        raise InvalidGraphError("need at least one component")
    union = parts[0] if len(parts) == 1 else GraphFamilySpec("union", parts=tuple(parts))
    upper = union_upper_bound(parts)
    if upper is None:
        raise InvalidGraphError(f"no known upper bound for {union.encode()}")
    pattern = union.build()
    t = vertex_cover_number(pattern) - 1

    rows = []
    previous = None
    for n in range(1, n_max + 1):
        record = ex_minor(n, union, jobs=jobs, budget=budget)
        ratio = Fraction(record.ex_value, n)
        construction = construction_edges(t, n) if n >= t else None
        upper_ok = ratio <= upper
        lower_ok = construction is None or record.ex_value >= construction
        monotone_ok = previous is None or record.ex_value >= previous
        previous = record.ex_value
        rows.append(
            {
                "h": union.encode(),
                "n": n,
                "ex": record.ex_value,
                "ratio": ratio,
                "upper": upper,
                "construction": construction,
                "lower_limit": Fraction(t),
                "tight": upper == t,
                "upper_ok": upper_ok,
                "lower_ok": lower_ok,
                "monotone_ok": monotone_ok,
                "ok": upper_ok and lower_ok and monotone_ok,
            }
        )
    return make_report(rows)
