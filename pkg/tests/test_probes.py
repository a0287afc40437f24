from fractions import Fraction

import pandas as pd
import pytest

from densesplit.errors import BudgetExceeded, InvalidGraphError
from densesplit.graph_core import make_complete
from densesplit.lab.probes import (
    check_dirac_justesen,
    check_erdos_gallai,
    conjectured_cycle_constant,
    dirac_justesen_threshold,
    find_spanning_partition,
    probe_cycle_conjecture,
    probe_partition_conjecture,
    spanning_partition_ok,
)

SEED = 20240601


def test_erdos_gallai_holds_on_random_graphs():
    report = check_erdos_gallai(7, trials=40, seed=SEED)
    assert len(report) == 40
    assert report["ok"].all()
    assert (report["m"] > report["threshold"]).all()


def test_same_seed_same_report():
    pd.testing.assert_frame_equal(
        check_erdos_gallai(6, trials=15, seed=3),
        check_erdos_gallai(6, trials=15, seed=3),
    )


def test_erdos_gallai_guards():
    with pytest.raises(BudgetExceeded):
        check_erdos_gallai(15, trials=1)
    with pytest.raises(InvalidGraphError):
        check_erdos_gallai(2, trials=1)


@pytest.mark.parametrize("n, expected", [(6, 12), (7, 15), (8, 18), (20, 54)])
def test_dirac_justesen_threshold(n, expected):
    assert dirac_justesen_threshold(n) == expected


def test_dirac_justesen_threshold_for_three_cycles():
    # max{5(n-3), n-20}
    assert dirac_justesen_threshold(9, k=3) == 30


def test_dirac_justesen_holds_on_random_graphs():
    report = check_dirac_justesen(8, trials=20, seed=SEED)
    assert report["ok"].all()
    assert (report["observed"] >= 2).all()
    with pytest.raises(InvalidGraphError):
        check_dirac_justesen(5, trials=1)


def test_spanning_partition_of_k5():
    k5 = make_complete(5)
    parts = find_spanning_partition(k5, Fraction(1), Fraction(0))
    assert parts is not None
    assert parts[0] | parts[1] == frozenset(range(5))
    assert spanning_partition_ok(k5, *parts, Fraction(1), Fraction(0))
    assert find_spanning_partition(make_complete(3), Fraction(1), Fraction(1)) is None


def test_partition_probe_finds_splits():
    report = probe_partition_conjecture(6, 1, 0, trials=10, seed=SEED)
    assert report["ok"].all()
    assert list(report["n"]) == [5, 6]
    assert list(report["mode"]) == ["exhaustive", "random"]
    assert (report["checked"] == report["split"]).all()


def test_partition_probe_reports_a_doctored_counterexample():
    report = probe_partition_conjecture(5, 1, 0, seed=SEED, predicate=lambda *args: False)
    assert not report["ok"].any()
    assert report["counterexample"].iloc[0] == make_complete(5).edges()


def test_partition_probe_guards():
    with pytest.raises(BudgetExceeded):
        probe_partition_conjecture(11, 1, 1, trials=1)
    with pytest.raises(InvalidGraphError):
        probe_partition_conjecture(5, -1, 1, trials=1)


@pytest.mark.parametrize(
    "h, expected",
    [("C4", Fraction(3, 2)), ("C6", Fraction(5, 2)), ("2C4", Fraction(7, 2)), ("C3+C4", Fraction(3)), ("C5", Fraction(2))],
)
def test_conjectured_cycle_constant(h, expected):
    assert conjectured_cycle_constant(h) == expected


def test_conjectured_cycle_constant_needs_cycles():
    with pytest.raises(InvalidGraphError):
        conjectured_cycle_constant("K4")


def test_cycle_conjecture_probe_is_informational():
    report = probe_cycle_conjecture("C4", 5)
    assert report["ok"].all()
    assert report["consistent"].all()
    assert (report["conjectured"] == Fraction(3, 2)).all()
    assert list(report["ex"]) == [0, 1, 3, 4, 6]


def test_budget_override_reaches_the_desk_checks():
    assert len(check_erdos_gallai(6, trials=3, seed=1, budget=6)) == 3
    with pytest.raises(BudgetExceeded):
        check_erdos_gallai(6, trials=1, seed=1, budget=5)
    with pytest.raises(BudgetExceeded):
        check_dirac_justesen(7, trials=1, seed=1, budget=6)
    with pytest.raises(BudgetExceeded):
        probe_partition_conjecture(6, 1, 0, trials=1, budget=5)
    with pytest.raises(BudgetExceeded):
        probe_cycle_conjecture("C4", 5, budget=4)


@pytest.mark.slow
def test_erdos_gallai_acceptance_run():
    report = check_erdos_gallai(8, trials=500, seed=SEED)
    assert len(report) == 500
    assert report["ok"].all()


@pytest.mark.slow
def test_dirac_justesen_acceptance_run():
    report = check_dirac_justesen(9, trials=200, seed=SEED)
    assert report["ok"].all()


@pytest.mark.slow
@pytest.mark.parametrize("s, t", [(1, 0), (Fraction(1, 2), Fraction(1, 2)), (1, 1)])
def test_partition_search_acceptance_run(s, t):
    report = probe_partition_conjecture(8, s, t, seed=SEED)
    assert report["ok"].all()
    assert report["counterexample"].isna().all()
