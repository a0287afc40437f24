# Search budgets, in vertices. Every entry can be overridden per call or with --budget.
BUDGETS = {
    'vertex_cover': 24,
    'minor': 14,
    'minor_small_h_graph': 20,  ## host size allowed when the pattern is tiny
    'minor_small_h': 5,
    'cycles': 14,
    'ex_labeled': 6,  ## labeled enumeration up to here, isomorphism classes above
    'ex_max': 7,
    'exhaustive_split': 16,
    'partition_probe': 10,
    'partition_exhaustive': 5,
}

# Extremal results ledger (one JSON record per line)
LEDGER = {
    'path': 'ex_ledger.jsonl',
}

LOGGING = {
    'level': 'INFO',
    'format': "%(asctime)s - %(levelname)s - %(message)s",
    'datefmt': "%Y-%m-%d %H:%M:%S",
}

PROBES = {
    'trials': 100,
    'erdos_gallai_k': (3, 7),
    'lower_bound_spot_n': 8,
}
