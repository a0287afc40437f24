import numpy as np
import pytest

from densesplit.graph_core import make_complete, write_graph


@pytest.fixture
def k7():
    return make_complete(7)


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


@pytest.fixture
def graph_file(tmp_path):
    """Write a graph to a temporary text file and return its path."""

    def write(g, name="graph.txt"):
        path = tmp_path / name
        write_graph(g, path)
        return path

    return write


@pytest.fixture
def ledger_path(tmp_path):
    return tmp_path / "ledger.jsonl"
