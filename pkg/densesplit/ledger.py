# -*- coding: utf-8 -*-

# Line-delimited JSON ledger of extremal results, keyed by (n, canonical h)
import json
import logging
from pathlib import Path

log = logging.getLogger(__name__)

from .errors import GraphFormatError, LedgerMismatch
from .lab.extremal import ExtremalRecord
from .settings import LEDGER


def connect(path=None) -> Path:
    ledger = Path(path or LEDGER['path'])
    if ledger.parent and not ledger.parent.exists():
        ledger.parent.mkdir(parents=True, exist_ok=True)
    return ledger


def load_records(path=None) -> dict[tuple[int, str], ExtremalRecord]:
    ledger = connect(path)
    records = {}
    if not ledger.exists():
        return records
    for lineno, line in enumerate(ledger.read_text().splitlines(), start=1):
        if not line.strip():
            continue
        try:
            record = ExtremalRecord.from_json(json.loads(line))
        except (ValueError, KeyError) as err:
            log.error(f"Unreadable ledger line {lineno} in {ledger}")
            raise GraphFormatError(f"{ledger}:{lineno}: {err}") from None
        records[record.key] = record
    log.debug(f"Loaded {len(records)} ledger records from {ledger}")
    return records


def append_record(record: ExtremalRecord, path=None) -> None:
    ledger = connect(path)
    with ledger.open("a") as handle:
        handle.write(json.dumps(record.to_json(), sort_keys=True) + "\n")
    log.info(f"Recorded ex_m({record.n}, {record.h_code}) = {record.ex_value} in {ledger}")


def verify_record(record: ExtremalRecord, path=None) -> bool:
    """True when a stored record agrees; a new key is appended and False returned."""
    stored = load_records(path).get(record.key)
    if stored is None:
        append_record(record, path)
        return False
    if stored.ex_value != record.ex_value:
        log.error(f"Ledger mismatch for {record.key}: stored {stored.ex_value}, computed {record.ex_value}")
        raise LedgerMismatch(
            f"ex_m({record.n}, {record.h_code}): ledger has {stored.ex_value}, recomputed {record.ex_value}"
        )
    log.debug(f"Ledger hit for {record.key}")
    return True
