import dataclasses

import pytest

from densesplit.errors import GraphFormatError, LedgerMismatch
from densesplit.lab.extremal import ex_minor
from densesplit.ledger import append_record, connect, load_records, verify_record


@pytest.fixture(scope="module")
def record():
    return ex_minor(5, "K4")


def test_new_record_is_appended_then_confirmed(record, ledger_path):
    assert load_records(ledger_path) == {}
    assert verify_record(record, ledger_path) is False
    assert verify_record(record, ledger_path) is True
    assert len(ledger_path.read_text().splitlines()) == 1
    assert load_records(ledger_path)[(5, "K4")] == record


def test_disagreeing_record_raises(record, ledger_path):
    append_record(record, ledger_path)
    tampered = dataclasses.replace(record, ex_value=record.ex_value + 1)
    with pytest.raises(LedgerMismatch, match="ledger has 7"):
        verify_record(tampered, ledger_path)


def test_unreadable_line_is_a_format_error(record, ledger_path):
    append_record(record, ledger_path)
    with ledger_path.open("a") as handle:
        handle.write("{not json\n")
    with pytest.raises(GraphFormatError, match=":2:"):
        load_records(ledger_path)


def test_connect_creates_parent_directories(tmp_path):
    path = connect(tmp_path / "runs" / "ex.jsonl")
    assert path.parent.is_dir()
    assert not path.exists()
