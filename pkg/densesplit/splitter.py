"""Constructive splitting of a dense graph into two disjoint dense pieces.

Given ``e(G) > (s+t+1)(v(G)-1)`` with ``s, t >= 1`` the splitter returns
disjoint non-empty vertex sets with ``e(G1) > s(v(G1)-1)`` and
``e(G2) > t(v(G2)-1)``. The route:

1. start from the constant balanced vector (``init_balanced``);
2. move pairs of non-adjacent fractional coordinates until the fractional
   support is a clique (``round_off_clique``);
3. freeze the clique state and round inside the clique, either keeping both
   adjusted potentials (``clique_round_main``) or cutting off a large clique
   (``clique_fallback``).

Every move is recorded as a ``TraceStep`` and every result goes through
``verify_certificate`` and ``check_trace``.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import pairwise
from typing import Iterator, Sequence

from .errors import BudgetExceeded, InternalProofGap, InvalidGraphError, PreconditionDensity
from .fractional import (
    HALF,
    CliqueRoundState,
    FracVector,
    SplitParams,
    clique_coefficients,
    fbar_potential,
    format_rational,
    fractional_support,
    gbar_potential,
    is_balanced,
)
from .graph_core import Graph, set_to_bits
from .settings import BUDGETS

log = logging.getLogger(__name__)

__all__ = [
    "CliqueRoundState",
    "SplitResult",
    "TraceStep",
    "check_trace",
    "clique_fallback",
    "clique_round_main",
    "clique_stage",
    "exhaustive_split",
    "find_pair_direction",
    "init_balanced",
    "round_off_clique",
    "split",
    "trace_to_json",
    "verify_certificate",
]

STAGES = ("init", "pair_move", "clique_enter", "clique_move", "final_round", "fallback")

# segments whose potentials must not decrease step over step
_MONOTONE_SEGMENTS = {"init": "round", "pair_move": "round", "clique_enter": "clique", "clique_move": "clique"}

Direction = tuple[Fraction, Fraction]

_AXIS_AND_DIAGONAL: tuple[Direction, ...] = tuple(
    (Fraction(a), Fraction(b))
    for a, b in ((1, 0), (-1, 0), (0, 1), (0, -1), (1, 1), (-1, -1), (1, -1), (-1, 1))
)


@dataclass(frozen=True)
class TraceStep:
    stage: str
    touched: tuple[int, ...] = ()
    direction: tuple[Fraction, ...] = ()
    step: Fraction = Fraction(0)
    potentials: tuple[Fraction, ...] = ()
    potential_names: tuple[str, ...] = ("f", "g")
    vector: tuple[Fraction, ...] = ()
    fractional_count: int = 0
    balanced: bool | None = None
    note: str = ""

    def __post_init__(self):
        if self.stage not in STAGES:
            raise ValueError(f"unknown trace stage {self.stage!r}")

    def to_json(self) -> dict:
        return {
            "stage": self.stage,
            "touched": list(self.touched),
            "direction": [format_rational(v) for v in self.direction],
            "step": format_rational(Fraction(self.step)),
            "potentials": dict(zip(self.potential_names, (format_rational(v) for v in self.potentials))),
            "fractional_count": self.fractional_count,
            "balanced": self.balanced,
            "vector": [format_rational(v) for v in self.vector],
            "note": self.note,
        }


@dataclass(frozen=True)
class SplitResult:
    part1: frozenset[int]
    part2: frozenset[int]
    densities: tuple[int, int, int, int]
    certificate_ok: bool
    trace: list[TraceStep] = field(default_factory=list, compare=False)
    branch: str = "main"

    def to_json(self) -> dict:
        e1, v1, e2, v2 = self.densities
        return {
            "part1": sorted(self.part1),
            "part2": sorted(self.part2),
            "densities": {"e1": e1, "v1": v1, "e2": e2, "v2": v2},
            "certificate_ok": self.certificate_ok,
            "branch": self.branch,
        }


# ------------------------------------------------------------------ checks

def verify_certificate(g: Graph, parts: Sequence[frozenset[int]], p: SplitParams) -> bool:
    """Exact check of disjointness, non-nullity and both strict density bounds."""
    part1, part2 = (frozenset(part) for part in parts)
    if not part1 or not part2 or part1 & part2:
        return False
    if any(not 0 <= v < g.n for v in part1 | part2):
        return False
    e1 = g.edges_within(set_to_bits(part1))
    e2 = g.edges_within(set_to_bits(part2))
    return e1 > p.s * (len(part1) - 1) and e2 > p.t * (len(part2) - 1)


def check_trace(trace: Sequence[TraceStep]) -> list[str]:
    """Replay the audit trail and return every violated invariant."""
    problems = []
    for index, step in enumerate(trace):
        if any(not 0 <= v <= 1 for v in step.vector):
            problems.append(f"step {index} ({step.stage}) leaves the unit box")
        if step.stage == "pair_move" and step.balanced is not True:
            problems.append(f"step {index} pair move lost balancedness")

    for index, (prev, step) in enumerate(pairwise(trace), start=1):
        segment = _MONOTONE_SEGMENTS.get(step.stage)
        if segment is None or _MONOTONE_SEGMENTS.get(prev.stage) != segment:
            continue
        if step.potential_names != prev.potential_names:
            continue
        for name, before, after in zip(step.potential_names, prev.potentials, step.potentials):
            if after < before:
                problems.append(f"step {index} ({step.stage}) decreased {name}: {before} -> {after}")
        if step.stage in ("pair_move", "clique_move") and step.fractional_count >= prev.fractional_count:
            problems.append(f"step {index} ({step.stage}) did not shrink the fractional support")

    moves = sum(1 for step in trace if step.stage in ("pair_move", "clique_move"))
    if trace and trace[0].vector and moves > 2 * len(trace[0].vector):
        problems.append(f"{moves} moves exceed twice the vertex count")
    return problems


def _require_density(g: Graph, p: SplitParams) -> None:
    if g.n == 0:
        raise PreconditionDensity("the graph must be non-null")
    bound = p.total * (g.n - 1)
    if not g.edge_count > bound:
        raise PreconditionDensity(
            f"density hypothesis fails: e(G) = {g.edge_count} is not > (s+t+1)(v(G)-1) = {bound}"
        )


def _finish(g: Graph, p: SplitParams, part1, part2, trace, branch: str) -> SplitResult:
    part1, part2 = frozenset(part1), frozenset(part2)
    e1 = g.edges_within(set_to_bits(part1))
    e2 = g.edges_within(set_to_bits(part2))
    ok = verify_certificate(g, (part1, part2), p)
    if not ok:
        log.error(f"certificate failed on branch {branch}: parts {sorted(part1)} / {sorted(part2)}")
        raise InternalProofGap(f"certificate failed on branch {branch}", trace)
    return SplitResult(part1, part2, (e1, len(part1), e2, len(part2)), ok, list(trace), branch)


# ------------------------------------------------------------ pair moves

def _dot(c: Direction, v: Direction) -> Fraction:
    return c[0] * v[0] + c[1] * v[1]


def _level_directions(c: Direction) -> list[Direction]:
    """Both orientations of the line {v : c.v = 0}, first nonzero coordinate positive first."""
    v = (-c[1], c[0])
    if v[0] < 0 or (v[0] == 0 and v[1] < 0):
        v = (-v[0], -v[1])
    return [v, (-v[0], -v[1])]


def _candidate_directions(coeffs_f: Direction, coeffs_g: Direction) -> Iterator[Direction]:
    zero = (0, 0)
    ordered: list[Direction] = []
    if coeffs_f == zero and coeffs_g != zero:
        ordered += _level_directions(coeffs_g)
    elif coeffs_g == zero and coeffs_f != zero:
        ordered += _level_directions(coeffs_f)
    ordered += _AXIS_AND_DIAGONAL
    if coeffs_f != zero:
        ordered += _level_directions(coeffs_f)
    if coeffs_g != zero:
        ordered += _level_directions(coeffs_g)

    seen = set()
    for v in ordered:
        if v == zero or v in seen:
            continue
        seen.add(v)
        if _dot(coeffs_f, v) >= 0 and _dot(coeffs_g, v) >= 0:
            yield v


def find_pair_direction(coeffs_f: Sequence[Fraction], coeffs_g: Sequence[Fraction]) -> Direction:
    """A nonzero (v_i, v_j) along which neither linear form decreases.

    Two closed half-planes through the origin always share a ray, so this never
    fails; the order of preference is documented in DESIGN.md.
    """
    a = (Fraction(coeffs_f[0]), Fraction(coeffs_f[1]))
    b = (Fraction(coeffs_g[0]), Fraction(coeffs_g[1]))
    return next(_candidate_directions(a, b))


def _max_step(x: FracVector, coords: tuple[int, int], v: Direction) -> Fraction:
    limits = []
    for k, vk in zip(coords, v):
        if vk > 0:
            limits.append((1 - x[k]) / vk)
        elif vk < 0:
            limits.append(x[k] / -vk)
    return min(limits)


def _first_non_adjacent_pair(g: Graph, support: frozenset[int]) -> tuple[int, int] | None:
    ordered = sorted(support)
    for pos, i in enumerate(ordered):
        for j in ordered[pos + 1:]:
            if not g.has_edge(i, j):
                return i, j
    return None


def _f_slope(g: Graph, x: FracVector, i: int, p: SplitParams) -> Fraction:
    return sum((x[k] for k in g.neighbors(i)), Fraction(0)) - (p.s + HALF)


def _g_slope(g: Graph, x: FracVector, i: int, p: SplitParams) -> Fraction:
    return (p.t + HALF) - sum((1 - x[k] for k in g.neighbors(i)), Fraction(0))


# ---------------------------------------------------------------- stages

def init_balanced(g: Graph, p: SplitParams, trace: list | None = None) -> FracVector:
    _require_density(g, p)
    x = FracVector.constant(g, (p.s + HALF) / p.total)
    report = is_balanced(g, x, p)
    if trace is not None:
        trace.append(
            TraceStep(
                "init",
                potentials=(report.f_value, report.g_value),
                vector=x.entries,
                fractional_count=len(fractional_support(x)),
                balanced=report.balanced,
            )
        )
    if not report.balanced:
        raise InternalProofGap(f"constant start vector is not balanced: {report.failed()}", trace)
    return x


def round_off_clique(g: Graph, x: FracVector, p: SplitParams, trace: list | None = None) -> FracVector:
    """Move non-adjacent fractional pairs until the fractional support is a clique."""
    trace = [] if trace is None else trace
    report = is_balanced(g, x, p)
    if not report.balanced:
        raise InternalProofGap(f"round_off_clique needs a balanced start, failed {report.failed()}", trace)

    while True:
        pair = _first_non_adjacent_pair(g, fractional_support(x))
        if pair is None:
            return x
        i, j = pair
        a = (_f_slope(g, x, i, p), _f_slope(g, x, j, p))
        b = (_g_slope(g, x, i, p), _g_slope(g, x, j, p))
        v = find_pair_direction(a, b)
        eps = _max_step(x, pair, v)
        x = x.replace({i: x[i] + eps * v[0], j: x[j] + eps * v[1]})

        report = is_balanced(g, x, p)
        trace.append(
            TraceStep(
                "pair_move",
                touched=pair,
                direction=v,
                step=eps,
                potentials=(report.f_value, report.g_value),
                vector=x.entries,
                fractional_count=len(fractional_support(x)),
                balanced=report.balanced,
            )
        )
        log.debug(f"pair move on {pair} by {eps} along {v}: f={report.f_value}, g={report.g_value}")
        if not report.balanced:
            raise InternalProofGap(f"pair move on {pair} broke balancedness: {report.failed()}", trace)


def _is_clique(g: Graph, vertices: frozenset[int]) -> bool:
    mask = set_to_bits(vertices)
    return all((g.adjacency[i] | 1 << i) & mask == mask for i in vertices)


def _clique_entry_bounds(state: CliqueRoundState, p: SplitParams) -> tuple[Fraction, Fraction]:
    c = state.c
    f_bound = Fraction(state.a, 2) + state.q ** 2 / (2 * c) - (p.s + HALF) ** 2 / p.total
    g_bound = Fraction(state.b, 2) + (c - state.q) ** 2 / (2 * c) - (p.t + HALF) ** 2 / p.total
    return f_bound, g_bound


def _require_entry_bounds(
    g: Graph, y: FracVector, state: CliqueRoundState, p: SplitParams, trace: list
) -> tuple[Fraction, Fraction]:
    """Both adjusted potentials of ``y`` must clear their entry bounds before rounding in C."""
    fbar_y = fbar_potential(g, y, state, p)
    gbar_y = gbar_potential(g, y, state, p)
    if state.c == 0:
        return fbar_y, gbar_y
    f_bound, g_bound = _clique_entry_bounds(state, p)
    if not (fbar_y > f_bound and gbar_y > g_bound):
        raise InternalProofGap(
            f"clique entry bounds fail: fbar={fbar_y} vs {f_bound}, gbar={gbar_y} vs {g_bound}", trace
        )
    return fbar_y, gbar_y


def clique_stage(g: Graph, y: FracVector, p: SplitParams, trace: list | None = None) -> SplitResult:
    trace = [] if trace is None else trace
    support = fractional_support(y)
    if not _is_clique(g, support):
        raise InvalidGraphError("clique_stage needs a vector whose fractional support is a clique")
    report = is_balanced(g, y, p)
    if not report.balanced:
        raise InternalProofGap(f"clique stage entered with an unbalanced vector: {report.failed()}", trace)

    state = CliqueRoundState.from_vector(g, y)
    state.check(g)
    fbar_y = fbar_potential(g, y, state, p)
    gbar_y = gbar_potential(g, y, state, p)

    if state.c == 0:
        branch = "direct"
    elif state.r <= 2 * p.s and state.c - state.r - 1 <= 2 * p.t:
        branch = "main"
    else:
        branch = "fallback"
    trace.append(
        TraceStep(
            "clique_enter",
            touched=tuple(sorted(state.C)),
            potentials=(fbar_y, gbar_y),
            potential_names=("fbar", "gbar"),
            vector=y.entries,
            fractional_count=state.c,
            note=f"{branch}: a={state.a} b={state.b} c={state.c} q={state.q} r={state.r}",
        )
    )
    log.debug(f"clique stage: a={state.a} b={state.b} c={state.c} q={state.q} r={state.r} -> {branch}")

    if branch == "direct":
        return _finish(g, p, state.A, state.B, trace, branch)
    if branch == "main":
        return clique_round_main(g, y, state, p, trace)
    return clique_fallback(g, y, state, p, trace)


def _clique_mass(z: FracVector, state: CliqueRoundState) -> Fraction:
    return sum((z[i] for i in state.C), Fraction(0))


def clique_round_main(
    g: Graph, y: FracVector, state: CliqueRoundState, p: SplitParams, trace: list | None = None
) -> SplitResult:
    """Pairwise affine moves inside C, then round the last fractional coordinate."""
    trace = [] if trace is None else trace
    if not (state.r <= 2 * p.s and state.c - state.r - 1 <= 2 * p.t):
        raise InvalidGraphError("clique_round_main needs r <= 2s and c-r-1 <= 2t")

    fbar_y, gbar_y = _require_entry_bounds(g, y, state, p, trace)
    z = y
    while True:
        support = sorted(fractional_support(z))
        if len(support) <= 1:
            break
        i, j = support[0], support[1]
        coeffs = clique_coefficients(g, z, state, p)
        a = (coeffs[i][0], coeffs[j][0])
        b = (coeffs[i][1], coeffs[j][1])

        # the norms are affine along a move, so checking the endpoint suffices
        move = None
        mass = z.norm1()
        for v in _candidate_directions(a, b):
            eps = _max_step(z, (i, j), v)
            after = mass + eps * (v[0] + v[1])
            if after > 1 and g.n - after > 1:
                move = (v, eps)
                break
        if move is None:
            raise InternalProofGap(f"no move on ({i}, {j}) keeps both norms above 1", trace)

        v, eps = move
        z = z.replace({i: z[i] + eps * v[0], j: z[j] + eps * v[1]})
        trace.append(
            TraceStep(
                "clique_move",
                touched=(i, j),
                direction=v,
                step=eps,
                potentials=(fbar_potential(g, z, state, p), gbar_potential(g, z, state, p)),
                potential_names=("fbar", "gbar"),
                vector=z.entries,
                fractional_count=len(fractional_support(z)),
            )
        )

    fbar_z = fbar_potential(g, z, state, p)
    gbar_z = gbar_potential(g, z, state, p)
    if fbar_z < fbar_y or gbar_z < gbar_y:
        raise InternalProofGap(f"clique moves lost ground: fbar {fbar_y} -> {fbar_z}, gbar {gbar_y} -> {gbar_z}", trace)

    support = fractional_support(z)
    if support:
        (i,) = support
        # ties go down
        value = Fraction(0) if z[i] <= HALF else Fraction(1)
        z = z.replace({i: value})
        fbar_star = fbar_potential(g, z, state, p)
        gbar_star = gbar_potential(g, z, state, p)
        trace.append(
            TraceStep(
                "final_round",
                touched=(i,),
                potentials=(fbar_star, gbar_star),
                potential_names=("fbar", "gbar"),
                vector=z.entries,
                note=f"z_{i} -> {value}",
            )
        )
        if not (fbar_star > -p.s and gbar_star > -p.t):
            log.warning(f"rounded vector misses the adjusted bounds: fbar={fbar_star}, gbar={gbar_star}")

    return _finish(g, p, z.support(1), z.support(0), trace, "main")


def _cut_off_clique(
    g: Graph, y: FracVector, state: CliqueRoundState, p: SplitParams, trace: list
) -> tuple[frozenset[int], frozenset[int]]:
    """Raise fbar while the clique mass does not grow; the zeros left in C form a big clique.

    Returns ({z_i = 1}, {i in C : z_i = 0}) in the frame of ``state``.
    """
    names = ("gbar", "-clique_comass") if state.swapped else ("fbar", "-clique_mass")

    def record(stage, z, touched, direction=(), step=Fraction(0), note=""):
        shown = z.complement() if state.swapped else z
        trace.append(
            TraceStep(
                stage,
                touched=touched,
                direction=direction,
                step=step,
                potentials=(fbar_potential(g, z, state, p), -_clique_mass(z, state)),
                potential_names=names,
                vector=shown.entries,
                fractional_count=len(fractional_support(z)),
                note=note,
            )
        )

    fbar_y = fbar_potential(g, y, state, p)
    mass_y = _clique_mass(y, state)
    shrink = (Fraction(-1), Fraction(-1))
    z = y
    while True:
        support = sorted(fractional_support(z))
        if len(support) <= 1:
            break
        i, j = support[0], support[1]
        coeffs = clique_coefficients(g, z, state, p)
        v = find_pair_direction((coeffs[i][0], coeffs[j][0]), shrink)
        eps = _max_step(z, (i, j), v)
        z = z.replace({i: z[i] + eps * v[0], j: z[j] + eps * v[1]})
        record("clique_move", z, (i, j), v, eps)

    support = fractional_support(z)
    if support:
        (i,) = support
        slope = clique_coefficients(g, z, state, p)[i][0]
        value = Fraction(1) if slope >= 0 else Fraction(0)
        z = z.replace({i: value})
        record("final_round", z, (i,), note=f"slope {slope} sets z_{i} -> {value}")

    if fbar_potential(g, z, state, p) < fbar_y:
        raise InternalProofGap("clique cut-off lowered the adjusted potential", trace)
    if _clique_mass(z, state) > math.ceil(mass_y):
        raise InternalProofGap("clique cut-off grew the clique mass past its ceiling", trace)

    ones = z.support(1)
    zeros_in_clique = frozenset(i for i in state.C if z[i] == 0)
    if not ones:
        raise InternalProofGap("clique cut-off left no coordinate at 1", trace)
    return ones, zeros_in_clique


def clique_fallback(
    g: Graph, y: FracVector, state: CliqueRoundState, p: SplitParams, trace: list | None = None
) -> SplitResult:
    """Handle c-r-1 > 2t directly and r > 2s through the swap x -> 1-x, s <-> t.

    When both hold the t-side is cut first.
    """
    trace = [] if trace is None else trace
    if not (state.c - state.r - 1 > 2 * p.t or state.r > 2 * p.s):
        raise InvalidGraphError("clique_fallback needs r > 2s or c-r-1 > 2t")
    _require_entry_bounds(g, y, state, p, trace)
    if state.c - state.r - 1 > 2 * p.t:
        trace.append(TraceStep("fallback", touched=tuple(sorted(state.C)), note="cut clique for the t-side"))
        dense, clique = _cut_off_clique(g, y, state, p, trace)
        return _finish(g, p, dense, clique, trace, "fallback_t")
    trace.append(
        TraceStep("fallback", touched=tuple(sorted(state.C)), note="cut clique for the s-side (swapped frame)")
    )
    dense, clique = _cut_off_clique(g, y.complement(), state.swap(), p.swapped(), trace)
    return _finish(g, p, clique, dense, trace, "fallback_s")


# ------------------------------------------------------------ entry points

def exhaustive_split(g: Graph, p: SplitParams, budget: int | None = None) -> tuple[frozenset[int], frozenset[int]] | None:
    """First 2-coloring of V(G) whose classes pass the certificate, or None."""
    budget = BUDGETS['exhaustive_split'] if budget is None else budget
    if g.n > budget:
        raise BudgetExceeded("exhaustive_split", g.n, budget)
    full = g.vertex_mask
    for mask in range(1, full):
        part1 = frozenset(v for v in range(g.n) if mask >> v & 1)
        part2 = frozenset(range(g.n)) - part1
        if verify_certificate(g, (part1, part2), p):
            return part1, part2
    return None


def split(
    g: Graph, p: SplitParams, fallback_exhaustive: bool = False, budget: int | None = None
) -> SplitResult:
    """Run the constructive splitter; ``budget`` caps the exhaustive fallback."""
    _require_density(g, p)
    budget = BUDGETS['exhaustive_split'] if budget is None else budget
    trace: list[TraceStep] = []
    try:
        x = init_balanced(g, p, trace)
        y = round_off_clique(g, x, p, trace)
        result = clique_stage(g, y, p, trace)
        problems = check_trace(result.trace)
        if problems:
            raise InternalProofGap("; ".join(problems), result.trace)
    except InternalProofGap as gap:
        log.error(f"proof gap on a graph with n={g.n}, e={g.edge_count}: {gap}")
        if not fallback_exhaustive:
            raise
        if g.n > budget:
            log.warning(f"exhaustive fallback skipped: n={g.n} exceeds its budget {budget}")
            raise
        parts = exhaustive_split(g, p, budget)
        if parts is None:
            raise
        steps = gap.trace + [TraceStep("fallback", note=f"exhaustive search after: {gap}")]
        return _finish(g, p, parts[0], parts[1], steps, "exhaustive")

    log.debug(f"split n={g.n} e={g.edge_count} via {result.branch}: {result.densities}")
    return result


def trace_to_json(result: SplitResult, p: SplitParams) -> dict:
    return {
        "params": p.to_json(),
        "steps": [step.to_json() for step in result.trace],
        "result": result.to_json(),
    }
