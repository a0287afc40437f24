import json

import pytest

from densesplit import cli, splitter
from densesplit.cli import EXIT_BUDGET, EXIT_FAILED, EXIT_OK, EXIT_USAGE, main, parse_config
from densesplit.errors import GraphFormatError, InternalProofGap
from densesplit.graph_core import make_barK, make_complete, parse_family
from densesplit.lab.extremal import ExtremalRecord


def test_split_writes_result_and_trace(k7, graph_file, tmp_path, capsys):
    trace = tmp_path / "trace.json"
    output = tmp_path / "result.json"
    code = main(["split", str(graph_file(k7)), "--s", "1/1", "--t", "1", "--trace", str(trace), "--output", str(output)])
    assert code == EXIT_OK
    result = json.loads(output.read_text())
    assert result["certificate_ok"] is True
    assert json.loads(capsys.readouterr().out) == result
    assert json.loads(trace.read_text())["steps"][0]["stage"] == "init"


def test_split_below_density_is_a_usage_error(graph_file):
    assert main(["split", str(graph_file(make_complete(6))), "--s", "1", "--t", "1"]) == EXIT_USAGE


def test_decimal_parameters_are_rejected(graph_file):
    assert main(["split", str(graph_file(make_complete(7))), "--s", "1.5", "--t", "1"]) == EXIT_USAGE


def test_split_from_a_family():
    assert main(["split", "--family", "K9", "--s", "3/2", "--t", "1"]) == EXIT_OK


def test_minor_prints_embedding_or_none(graph_file, capsys):
    assert main(["minor", "--family", "K4", "--h", "C3"]) == EXIT_OK
    assert set(json.loads(capsys.readouterr().out)) == {"0", "1", "2"}
    assert main(["minor", str(graph_file(make_barK(1, 5))), "--h", "C3"]) == EXIT_OK
    assert capsys.readouterr().out.strip() == "none"


def test_minor_pattern_from_file(graph_file, capsys):
    pattern = graph_file(make_complete(3), "h.txt")
    assert main(["minor", "--family", "C5", "--pattern", str(pattern)]) == EXIT_OK
    assert len(json.loads(capsys.readouterr().out)) == 3


def test_circumference(capsys):
    assert main(["circumference", "--family", "2C3", "--disjoint"]) == EXIT_OK
    assert json.loads(capsys.readouterr().out) == {"circumference": 3, "disjoint_cycles": 2}


def test_budget_exceeded_has_its_own_exit_code():
    assert main(["circumference", "--family", "K15"]) == EXIT_BUDGET
    assert main(["circumference", "--family", "K8", "--budget", "6"]) == EXIT_BUDGET


def test_randomized_checks_need_a_seed():
    assert main(["check", "erdos-gallai", "--n-max", "6", "--trials", "5"]) == EXIT_USAGE
    assert main(["check", "erdos-gallai", "--n-max", "6", "--trials", "5", "--seed", "7"]) == EXIT_OK
    with pytest.raises(GraphFormatError, match="--seed"):
        parse_config(["probe", "partition", "--n-max", "5", "--s", "1", "--t", "0"])


def test_ex_checks_the_ledger(ledger_path, capsys):
    args = ["ex", "--n", "5", "--h", "K4", "--ledger", str(ledger_path)]
    assert main(args) == EXIT_OK
    assert json.loads(capsys.readouterr().out)["ex"] == 7
    assert main(args) == EXIT_OK
    assert len(ledger_path.read_text().splitlines()) == 1


def test_ex_with_a_bad_witness_leaves_the_ledger_alone(monkeypatch, ledger_path, capsys):
    bad = ExtremalRecord(4, parse_family("C3"), 6, make_complete(4), pattern=make_complete(3))
    monkeypatch.setattr(cli.extremal, "ex_minor", lambda *args, **kwargs: bad)
    assert main(["ex", "--n", "4", "--h", "C3", "--ledger", str(ledger_path)]) == EXIT_FAILED
    assert not ledger_path.exists()
    assert json.loads(capsys.readouterr().out)["ex"] == 6


def test_split_gap_without_room_for_the_fallback_fails(monkeypatch):
    def fail(g, y, p, trace=None):
        raise InternalProofGap("forced gap", trace)

    monkeypatch.setattr(splitter, "clique_stage", fail)
    args = ["split", "--family", "K20", "--s", "1", "--t", "1", "--fallback-exhaustive"]
    assert main(args) == EXIT_FAILED
    assert main(args + ["--budget", "20"]) == EXIT_OK


@pytest.mark.parametrize(
    "args",
    [
        ["check", "erdos-gallai", "--n-max", "6", "--trials", "1", "--seed", "1", "--budget", "4"],
        ["check", "dirac-justesen", "--n-max", "7", "--trials", "1", "--seed", "1", "--budget", "6"],
        ["check", "union-bound", "--n-max", "5", "--h", "C3", "--h", "C3", "--budget", "4"],
        ["check", "lower-bound", "--n-max", "8", "--h", "2C3", "--budget", "6"],
        ["probe", "partition", "--n-max", "6", "--s", "1", "--t", "0", "--trials", "1", "--seed", "1", "--budget", "5"],
        ["probe", "cycles", "--n-max", "5", "--h", "C4", "--budget", "4"],
    ],
)
def test_budget_flag_reaches_every_report_command(args):
    assert main(args) == EXIT_BUDGET


def test_report_commands(tmp_path):
    output = tmp_path / "report.json"
    assert main(["check", "lower-bound", "--n-max", "7", "--h", "2C3", "--output", str(output)]) == EXIT_OK
    assert json.loads(output.read_text())["summary"]["failed"] == 0
    assert main(["check", "union-bound", "--n-max", "5", "--h", "C3", "--h", "C3"]) == EXIT_OK
    assert main(["probe", "cycles", "--n-max", "4", "--h", "C4"]) == EXIT_OK


def test_config_errors_are_usage_errors(graph_file, tmp_path):
    assert main(["circumference", "--family", "K4", "--budget", "0"]) == EXIT_USAGE
    assert main(["circumference", "--family", "K4", "--jobs", "0"]) == EXIT_USAGE
    bad = tmp_path / "bad.txt"
    bad.write_text("3 2\n0 1\n")
    assert main(["circumference", str(bad)]) == EXIT_USAGE
    assert main(["circumference", str(tmp_path / "missing.txt")]) == EXIT_USAGE
    assert main(["circumference"]) == EXIT_USAGE
