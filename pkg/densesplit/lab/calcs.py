import logging
from fractions import Fraction
from itertools import combinations

import numpy as np
import pandas as pd

from ..errors import InvalidGraphError
from ..graph_core import Graph

log = logging.getLogger(__name__)


def random_graph(n: int, m: int, rng: np.random.Generator) -> Graph:
    """
    Uniform sample from the labeled graphs on n vertices with exactly m edges
    """
    pairs = list(combinations(range(n), 2))
    if not 0 <= m <= len(pairs):
        raise InvalidGraphError(f"cannot place {m} edges on {n} vertices")
    chosen = rng.choice(len(pairs), size=m, replace=False)
    return Graph.from_edges(n, (pairs[k] for k in sorted(chosen)))


def make_report(rows: list[dict]) -> pd.DataFrame:
    """
    One row per checked instance; every report carries a boolean ``ok`` column
    """
    df = pd.DataFrame.from_records(rows)
    if "ok" not in df.columns:
        df["ok"] = pd.Series(dtype=bool)
    df["ok"] = df["ok"].astype(bool)
    return df


def load_report_calcs(df: pd.DataFrame) -> pd.DataFrame:
    # margin by which the observed value beats its threshold, when both are present
    if {"observed", "threshold"} <= set(df.columns):
        df = df.assign(calc_margin=lambda x: x.observed - x.threshold)

    ## exact ratios stay Fractions; the float column is only for display
    if "ratio" in df.columns:
        df = df.assign(calc_ratio=lambda x: x.ratio.map(float).round(4))
    return df


def summarize(df: pd.DataFrame) -> dict:
    failed = df[~df["ok"]]
    summary = {
        "passed": int(df["ok"].sum()),
        "failed": len(failed),
        "violations": [_jsonable_row(row) for row in failed.to_dict(orient="records")],
    }
    log.debug(f"report summary: {summary['passed']} passed, {summary['failed']} failed")
    return summary


def tabulate_by(df: pd.DataFrame, key: str) -> pd.DataFrame:
    """
    Pass/fail counts per value of ``key`` (for instance per vertex count)
    """
    if df.empty or key not in df.columns:
        return pd.DataFrame(columns=[key, "trials", "passed", "failed"])
    grouped = df.groupby(key)["ok"].agg(trials="size", passed="sum").reset_index()
    return grouped.assign(failed=lambda x: x.trials - x.passed)


def report_ok(df: pd.DataFrame) -> bool:
    return bool(df["ok"].all())


def _jsonable(value):
    if isinstance(value, Fraction):
        return f"{value.numerator}/{value.denominator}"
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (np.bool_,)):
        return bool(value)
    if isinstance(value, (frozenset, set)):
        return sorted(value)
    if isinstance(value, float) and np.isnan(value):
        return None
    return value


def _jsonable_row(row: dict) -> dict:
    return {key: _jsonable(value) for key, value in row.items()}


def report_to_json(df: pd.DataFrame, title: str) -> dict:
    return {
        "report": title,
        "summary": summarize(df),
        "rows": [_jsonable_row(row) for row in df.to_dict(orient="records")],
    }
