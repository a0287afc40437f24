"""Seeded desk checks of classical cycle theorems and of the spanning-partition conjecture."""
from __future__ import annotations

import logging
import math
from fractions import Fraction
from typing import Callable

import numpy as np
import pandas as pd

from ..errors import BudgetExceeded, InvalidGraphError
from ..graph_core import Graph, GraphFamilySpec, parse_family, set_to_bits
from ..minor_oracle import circumference, max_disjoint_cycles
from ..settings import BUDGETS, PROBES
from .calcs import make_report, random_graph
from .extremal import ex_minor

log = logging.getLogger(__name__)

PartitionPredicate = Callable[[Graph, frozenset, frozenset, Fraction, Fraction], bool]


def _check_n_max(n_max: int, budget_key: str, what: str, budget: int | None = None) -> int:
    budget = BUDGETS[budget_key] if budget is None else budget
    if n_max > budget:
        raise BudgetExceeded(what, n_max, budget)
    return budget


def check_erdos_gallai(
    n_max: int, trials: int | None = None, seed: int = 0, budget: int | None = None
) -> pd.DataFrame:
    """More than (k-1)(n-1)/2 edges forces a cycle of length at least k."""
    budget = _check_n_max(n_max, 'cycles', "check_erdos_gallai", budget)
    if n_max < 3:
        raise InvalidGraphError("need n_max >= 3")
    trials = PROBES['trials'] if trials is None else trials
    k_low, k_high = PROBES['erdos_gallai_k']
    rng = np.random.default_rng(seed)

    rows = []
    for trial in range(trials):
        n = int(rng.integers(3, n_max + 1))
        k = int(rng.integers(k_low, min(k_high, n) + 1))
        threshold = Fraction((k - 1) * (n - 1), 2)
        m_low = math.floor(threshold) + 1
        m = int(rng.integers(m_low, n * (n - 1) // 2 + 1))
        longest = circumference(random_graph(n, m, rng), budget=budget)
        rows.append(
            {"trial": trial, "n": n, "k": k, "m": m, "threshold": threshold, "observed": longest, "ok": longest >= k}
        )
    report = make_report(rows)
    log.info(f"Erdos-Gallai: {int(report.ok.sum())}/{len(report)} graphs passed")
    return report


def dirac_justesen_threshold(n: int, k: int = 2) -> Fraction:
    return max(Fraction((2 * k - 1) * (n - k)), n - Fraction((3 * k - 1) * (3 * k - 4), 2))


def check_dirac_justesen(
    n_max: int,
    trials: int | None = None,
    seed: int = 0,
    k: int = 2,
    n_min: int = 6,
    budget: int | None = None,
) -> pd.DataFrame:
    """Above the threshold a graph on n >= 3k vertices has k vertex-disjoint cycles."""
    budget = _check_n_max(n_max, 'cycles', "check_dirac_justesen", budget)
    n_min = max(n_min, 3 * k)
    if n_max < n_min:
        raise InvalidGraphError(f"need n_max >= {n_min}")
    trials = PROBES['trials'] if trials is None else trials
    rng = np.random.default_rng(seed)

    rows = []
    for trial in range(trials):
        n = int(rng.integers(n_min, n_max + 1))
        threshold = dirac_justesen_threshold(n, k)
        m_low = math.floor(threshold) + 1
        m_high = n * (n - 1) // 2
        if m_low > m_high:
            continue
        m = int(rng.integers(m_low, m_high + 1))
        packed = max_disjoint_cycles(random_graph(n, m, rng), budget=budget)
        rows.append(
            {"trial": trial, "n": n, "k": k, "m": m, "threshold": threshold, "observed": packed, "ok": packed >= k}
        )
    report = make_report(rows)
    log.info(f"Dirac-Justesen (k={k}): {int(report.ok.sum())}/{len(report)} graphs passed")
    return report


# --------------------------------------------------- partition conjecture

def spanning_partition_ok(g: Graph, part1: frozenset, part2: frozenset, s: Fraction, t: Fraction) -> bool:
    return (
        g.edges_within(set_to_bits(part1)) >= s * len(part1)
        and g.edges_within(set_to_bits(part2)) >= t * len(part2)
    )


def find_spanning_partition(
    g: Graph, s: Fraction, t: Fraction, predicate: PartitionPredicate = spanning_partition_ok
) -> tuple[frozenset, frozenset] | None:
    vertices = frozenset(range(g.n))
    for mask in range(1, g.vertex_mask):
        part1 = frozenset(v for v in range(g.n) if mask >> v & 1)
        part2 = vertices - part1
        if predicate(g, part1, part2, s, t):
            return part1, part2
    return None


def _candidate_graphs(n: int, m_low: int, exhaustive: bool, trials: int, rng: np.random.Generator):
    pairs = n * (n - 1) // 2
    if m_low > pairs:
        return
    if exhaustive:
        all_pairs = [(u, v) for u in range(n) for v in range(u + 1, n)]
        for mask in range(1 << pairs):
            if mask.bit_count() >= m_low:
                yield Graph.from_edges(n, (all_pairs[i] for i in range(pairs) if mask >> i & 1))
        return
    for _ in range(trials):
        yield random_graph(n, int(rng.integers(m_low, pairs + 1)), rng)


def probe_partition_conjecture(
    n_max: int,
    s,
    t,
    trials: int | None = None,
    seed: int = 0,
    predicate: PartitionPredicate = spanning_partition_ok,
    budget: int | None = None,
) -> pd.DataFrame:
    """Look for a graph with e >= (s+t+1)v and no spanning split meeting e(Gi) >= s v(Gi), t v(Gi).

    Small n is searched exhaustively over labeled graphs, larger n by seeded sampling.
    """
    _check_n_max(n_max, 'partition_probe', "probe_partition_conjecture", budget)
    s, t = Fraction(s), Fraction(t)
    if s < 0 or t < 0:
        raise InvalidGraphError(f"s and t must be nonnegative, got s={s}, t={t}")
    trials = PROBES['trials'] if trials is None else trials
    rng = np.random.default_rng(seed)

    rows = []
    for n in range(2, n_max + 1):
        m_low = math.ceil((s + t + 1) * n)
        exhaustive = n <= BUDGETS['partition_exhaustive']
        checked = found = 0
        counterexample = None
        for g in _candidate_graphs(n, m_low, exhaustive, trials, rng):
            checked += 1
            if find_spanning_partition(g, s, t, predicate) is None:
                counterexample = g
                break
            found += 1
        if checked == 0:
            continue
        if counterexample is not None:
            log.warning(f"partition counterexample on n={n}: {counterexample.edges()}")
        rows.append(
            {
                "n": n,
                "s": s,
                "t": t,
                "mode": "exhaustive" if exhaustive else "random",
                "checked": checked,
                "split": found,
                "counterexample": counterexample.edges() if counterexample is not None else None,
                "ok": counterexample is None,
            }
        )
    return make_report(rows)


# ------------------------------------------------------ cycle conjecture

def conjectured_cycle_constant(spec: GraphFamilySpec | str) -> Fraction:
    if isinstance(spec, str):
        spec = parse_family(spec)
    parts = spec.flat_parts()
    if not parts or not all(part.kind == "cycle" for part in parts):
        raise InvalidGraphError(f"{spec.encode()} is not a disjoint union of cycles")
    lengths = [part.params[0] for part in parts]
    if len(lengths) == 1 and lengths[0] % 2 == 0:
        return Fraction(lengths[0] - 1, 2)
    if all(k == 4 for k in lengths):
        return 2 * len(lengths) - Fraction(1, 2)
    odd = sum(1 for k in lengths if k % 2)
    return Fraction(sum(lengths) + odd, 2) - 1


def probe_cycle_conjecture(
    spec: GraphFamilySpec | str, n_max: int, jobs: int = 1, budget: int | None = None
) -> pd.DataFrame:
    """Compare small-n ratios ex_m(n,H)/n with the conjectured constant; informational only."""
    if isinstance(spec, str):
        spec = parse_family(spec)
    conjectured = conjectured_cycle_constant(spec)
    rows = []
    for n in range(1, n_max + 1):
        record = ex_minor(n, spec, jobs=jobs, budget=budget)
        ratio = Fraction(record.ex_value, n)
        consistent = ratio <= conjectured
        if not consistent:
            log.warning(f"ex_m({n}, {spec.encode()})/n = {ratio} exceeds the conjectured {conjectured}")
        rows.append(
            {
                "h": spec.encode(),
                "n": n,
                "ex": record.ex_value,
                "ratio": ratio,
                "conjectured": conjectured,
                "consistent": consistent,
                "ok": True,
            }
        )
    return make_report(rows)
