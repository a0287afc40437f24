class DenseSplitError(Exception):
    """Base class for every error raised by densesplit."""


class GraphFormatError(DenseSplitError, ValueError):
    """Malformed graph text, family expression or rational literal."""


class InvalidGraphError(DenseSplitError, ValueError):
    """Parameters or vectors that do not fit the graph they refer to."""


class PreconditionDensity(DenseSplitError):
    """The density hypothesis e(G) > (s+t+1)(v(G)-1) does not hold."""


class BudgetExceeded(DenseSplitError):
    def __init__(self, what: str, size: int, budget: int):
        super().__init__(f"{what}: size {size} exceeds budget {budget}")
        self.what = what
        self.size = size
        self.budget = budget


class InternalProofGap(DenseSplitError):
    """A proof-guided step produced an invalid state; the trace replays it."""

    def __init__(self, message: str, trace=None):
        super().__init__(message)
        self.trace = list(trace or [])


class LedgerMismatch(DenseSplitError):
    """A recomputed extremal value disagrees with the stored ledger record."""
