import json
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from densesplit import splitter
from densesplit.errors import BudgetExceeded, InternalProofGap, InvalidGraphError, PreconditionDensity
from densesplit.fractional import CliqueRoundState, FracVector, SplitParams, fractional_support, is_balanced
from densesplit.graph_core import disjoint_union, make_complete, make_empty, make_null
from densesplit.lab.calcs import random_graph
from densesplit.splitter import (
    TraceStep,
    check_trace,
    clique_fallback,
    clique_round_main,
    clique_stage,
    exhaustive_split,
    find_pair_direction,
    init_balanced,
    round_off_clique,
    split,
    trace_to_json,
    verify_certificate,
)

from .strategies import SPLIT_PARAMS, dense_instances, fractions

ONE = SplitParams(1, 1)


def _assert_sound(g, p, result):
    assert result.certificate_ok
    assert result.part1 and result.part2
    assert not result.part1 & result.part2
    assert verify_certificate(g, (result.part1, result.part2), p)
    e1, v1, e2, v2 = result.densities
    assert e1 > p.s * (v1 - 1) and e2 > p.t * (v2 - 1)
    assert check_trace(result.trace) == []


def test_verify_certificate_examples(k7):
    assert verify_certificate(k7, (frozenset({0, 1, 2}), frozenset({3, 4, 5, 6})), ONE)
    assert not verify_certificate(k7, (frozenset({0}), frozenset({3, 4, 5, 6})), ONE)
    assert not verify_certificate(k7, (frozenset({0, 1, 2}), frozenset({2, 3, 4})), ONE)
    assert not verify_certificate(k7, (frozenset(), frozenset({3, 4, 5, 6})), ONE)


def test_split_k7(k7):
    result = split(k7, ONE)
    _assert_sound(k7, ONE, result)
    assert result.trace[0].stage == "init"


def test_split_rejects_boundary_density():
    with pytest.raises(PreconditionDensity, match="density hypothesis"):
        split(make_complete(6), ONE)
    with pytest.raises(PreconditionDensity):
        split(make_null(), ONE)
    with pytest.raises(PreconditionDensity):
        init_balanced(make_empty(3), ONE)


def test_init_vector_is_constant():
    g = make_complete(9)
    x = init_balanced(g, SplitParams(1, 2))
    assert set(x.entries) == {Fraction(3, 8)}
    assert is_balanced(g, x, SplitParams(1, 2)).balanced


@pytest.mark.parametrize(
    "a, b, expected",
    [
        ((1, 0), (1, 0), (1, 0)),
        ((1, -1), (-1, 1), (1, 1)),
        ((0, 0), (2, -3), (3, 2)),
        ((0, 0), (0, 0), (1, 0)),
        ((2, 2), (-1, -1), (1, -1)),
    ],
)
def test_find_pair_direction_examples(a, b, expected):
    assert find_pair_direction(a, b) == tuple(Fraction(v) for v in expected)


@given(st.tuples(*[fractions(6).map(lambda v: 2 * v - 1)] * 4))
def test_find_pair_direction_never_decreases_either_form(coeffs):
    a, b = coeffs[:2], coeffs[2:]
    v = find_pair_direction(a, b)
    assert v != (0, 0)
    assert a[0] * v[0] + a[1] * v[1] >= 0
    assert b[0] * v[0] + b[1] * v[1] >= 0


@settings(max_examples=60, deadline=None)
@given(dense_instances(max_n=16, choices=SPLIT_PARAMS[:3] + [Fraction(5, 2)]))
def test_constant_start_is_balanced_above_the_density_threshold(instance):
    g, p = instance
    x = init_balanced(g, p)
    report = is_balanced(g, x, p)
    assert report.balanced, report.failed()
    assert report.f_value > report.f_bound and report.g_value > report.g_bound


def test_round_off_leaves_a_clique_support_alone(k7):
    x = FracVector.constant(k7, Fraction(1, 2))
    assert round_off_clique(k7, x, ONE) == x


def test_round_off_confines_support_to_one_clique():
    g = disjoint_union([make_complete(5), make_complete(5)])
    x = FracVector((Fraction(9, 10),) * 5 + (Fraction(1, 10),) * 5, g)
    assert is_balanced(g, x, ONE).balanced
    trace = []
    y = round_off_clique(g, x, ONE, trace)
    support = fractional_support(y)
    assert support <= frozenset(range(5)) or support <= frozenset(range(5, 10))
    assert is_balanced(g, y, ONE).balanced
    counts = [step.fractional_count for step in trace]
    assert counts == sorted(counts, reverse=True)
    assert len(set(counts)) == len(counts)


def test_round_off_needs_balanced_start():
    g = make_complete(4)
    with pytest.raises(InternalProofGap):
        round_off_clique(g, FracVector.constant(g, Fraction(1, 2)), ONE)


def test_clique_stage_direct_readout():
    g = make_complete(8)
    y = FracVector((Fraction(1),) * 4 + (Fraction(0),) * 4, g)
    result = clique_stage(g, y, ONE)
    assert result.branch == "direct"
    assert (result.part1, result.part2) == (frozenset(range(4)), frozenset(range(4, 8)))


def test_clique_stage_main_rounds_half_down():
    g = make_complete(9)
    y = FracVector((Fraction(1),) * 4 + (Fraction(1, 2),) + (Fraction(0),) * 4, g)
    result = clique_stage(g, y, ONE)
    assert result.branch == "main"
    assert result.part1 == frozenset(range(4))
    assert result.part2 == frozenset(range(4, 9))
    assert result.trace[-1].stage == "final_round"
    assert check_trace(result.trace) == []


def test_clique_stage_cuts_a_large_clique_for_t():
    g = make_complete(8)
    y = FracVector.constant(g, Fraction(2, 5))
    result = clique_stage(g, y, ONE)
    assert result.branch == "fallback_t"
    # the clique side is more than 2t vertices
    assert len(result.part2) > 2
    assert result.densities[2] == math.comb(len(result.part2), 2)
    _assert_sound(g, ONE, result)


def test_clique_stage_cuts_a_large_clique_for_s_through_the_swap():
    g = make_complete(12)
    p = SplitParams(1, 2)
    y = FracVector.constant(g, Fraction(7, 12))
    assert is_balanced(g, y, p).balanced
    result = clique_stage(g, y, p)
    assert result.branch == "fallback_s"
    assert len(result.part1) > 2
    assert any("swapped frame" in step.note for step in result.trace)
    _assert_sound(g, p, result)


def test_clique_round_main_checks_its_entry_bounds():
    g = make_empty(5)
    y = FracVector((Fraction(1, 2),) + (Fraction(0),) * 4, g)
    state = CliqueRoundState.from_vector(g, y)
    assert (state.c, state.r) == (1, 0)
    # fbar = -1/2 clears -5/8 but gbar = -9/2 is far below 11/8
    with pytest.raises(InternalProofGap, match="entry bounds"):
        clique_round_main(g, y, state, ONE)


def test_clique_fallback_checks_its_entry_bounds():
    g = make_complete(8)
    y = FracVector.constant(g, Fraction(1, 10))
    state = CliqueRoundState.from_vector(g, y)
    assert state.c - state.r - 1 > 2
    # fbar = -4/5 is below -71/100
    with pytest.raises(InternalProofGap, match="entry bounds"):
        clique_fallback(g, y, state, ONE)


def test_clique_fallback_needs_a_large_clique_side():
    g = make_empty(5)
    y = FracVector((Fraction(1, 2),) + (Fraction(0),) * 4, g)
    with pytest.raises(InvalidGraphError):
        clique_fallback(g, y, CliqueRoundState.from_vector(g, y), ONE)


def test_check_trace_flags_decreasing_potential():
    steps = [
        TraceStep("init", potentials=(Fraction(1), Fraction(1)), vector=(Fraction(1, 2),) * 2, fractional_count=2, balanced=True),
        TraceStep("pair_move", (0, 1), potentials=(Fraction(0), Fraction(2)), vector=(Fraction(1), Fraction(1, 2)), fractional_count=1, balanced=True),
    ]
    problems = check_trace(steps)
    assert len(problems) == 1
    assert "decreased f" in problems[0]


def test_check_trace_flags_lost_balance_and_box():
    steps = [
        TraceStep("init", potentials=(Fraction(0), Fraction(0)), vector=(Fraction(1, 2),), fractional_count=1, balanced=True),
        TraceStep("pair_move", (0,), potentials=(Fraction(0), Fraction(0)), vector=(Fraction(2),), fractional_count=1, balanced=False),
    ]
    problems = check_trace(steps)
    assert any("unit box" in problem for problem in problems)
    assert any("balancedness" in problem for problem in problems)
    assert any("did not shrink" in problem for problem in problems)


def test_exhaustive_split(k7):
    parts = exhaustive_split(k7, ONE)
    assert parts is not None and verify_certificate(k7, parts, ONE)
    assert exhaustive_split(make_complete(3), ONE) is None
    with pytest.raises(BudgetExceeded):
        exhaustive_split(make_complete(17), ONE)


@pytest.fixture
def forced_gap(monkeypatch):
    def fail(g, y, p, trace=None):
        raise InternalProofGap("forced gap", trace)

    monkeypatch.setattr(splitter, "clique_stage", fail)


def test_fallback_keeps_the_gap_when_the_graph_is_too_large(forced_gap):
    with pytest.raises(InternalProofGap, match="forced gap"):
        split(make_complete(20), ONE, fallback_exhaustive=True)


def test_fallback_searches_within_budget(forced_gap, k7):
    result = split(k7, ONE, fallback_exhaustive=True)
    assert result.branch == "exhaustive"
    assert result.trace[-1].stage == "fallback"
    assert verify_certificate(k7, (result.part1, result.part2), ONE)

    wide = split(make_complete(20), ONE, fallback_exhaustive=True, budget=20)
    assert wide.branch == "exhaustive"
    assert wide.certificate_ok


def test_fallback_is_off_by_default(forced_gap, k7):
    with pytest.raises(InternalProofGap):
        split(k7, ONE)


def test_trace_json_uses_exact_rationals(k7):
    result = split(k7, ONE)
    doc = json.loads(json.dumps(trace_to_json(result, ONE)))
    assert doc["params"] == {"s": "1/1", "t": "1/1"}
    assert doc["steps"][0]["vector"][0] == "1/2"
    assert doc["result"]["certificate_ok"] is True


@settings(max_examples=40, deadline=None)
@given(dense_instances())
def test_split_is_sound_on_random_dense_graphs(instance):
    g, p = instance
    _assert_sound(g, p, split(g, p))


@settings(max_examples=20, deadline=None)
@given(dense_instances(max_n=12))
def test_split_is_sound_with_s_and_t_swapped(instance):
    g, p = instance
    _assert_sound(g, p, split(g, p))
    _assert_sound(g, p.swapped(), split(g, p.swapped()))


@pytest.mark.slow
def test_split_soundness_suite():
    rng = np.random.default_rng(5)
    runs = 0
    while runs < 1000:
        s = Fraction(SPLIT_PARAMS[rng.integers(len(SPLIT_PARAMS))])
        t = Fraction(SPLIT_PARAMS[rng.integers(len(SPLIT_PARAMS))])
        p = SplitParams(s, t)
        n = int(rng.integers(8, 61))
        m_low = math.floor(p.total * (n - 1)) + 1
        m_high = n * (n - 1) // 2
        if m_low > m_high:
            continue
        surplus = int(rng.integers(0, min(3 * n, m_high - m_low) + 1))
        g = random_graph(n, m_low + surplus, rng)
        _assert_sound(g, p, split(g, p))
        runs += 1
