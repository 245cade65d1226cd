import threading
from abc import ABC
from abc import abstractmethod
from typing import Union

import numpy as np

from _capsim_sdk.exceptions import ContractViolationError
from _capsim_sdk.exceptions import DimensionMismatchError
from _capsim_sdk.model.models import EventStream
from _capsim_sdk.synthetic.valuation import valuation_matrix

# a contiguous slice or an array of 0-based positions into an EventStream
Rows = Union[slice, np.ndarray]


class AuctionRule(ABC):
    """
    The map f(e, a) from an event and an activation vector to per-campaign spend increments.

    Subclasses implement `_spends()`; callers go through `spends()`, which checks the activation shape and counts
    evaluated events. `max_increment` is a strict upper bound on any single increment, so the declared constant of
    the small-contribution assumption for an N-event stream is `declared_C(N) = N * max_increment`.
    """

    def __init__(self, n_campaigns: int):
        self.n_campaigns = n_campaigns
        self._evaluations = 0
        self._lock = threading.Lock()

    @property
    @abstractmethod
    def max_increment(self) -> float:
        ...

    @abstractmethod
    def _spends(self, events: EventStream, rows: Rows, active: np.ndarray) -> np.ndarray:
        ...

    def declared_C(self, n_events: int) -> float:
        return n_events * self.max_increment

    @property
    def evaluations(self) -> int:
        """Number of (event, activation) pairs evaluated so far."""
        return self._evaluations

    def reset_evaluations(self):
        with self._lock:
            self._evaluations = 0

    def _count(self, n: int):
        with self._lock:
            self._evaluations += n

    def spends(self, events: EventStream, rows: Rows, active) -> np.ndarray:
        """
        Spend increments for the events at `rows`.

        **Parameters**:

        * **events**: `EventStream` - Source of payloads.
        * **rows**: `slice | numpy.ndarray` - Contiguous slice or 0-based positions.
        * **active**: `numpy.ndarray` - A (K,) activation shared by all rows, or an (n, K) activation per row.

        **Returns**: An (n, K) array of increments.
        """
        active = np.asarray(active, dtype=bool)
        if active.shape[-1] != self.n_campaigns:
            raise DimensionMismatchError(
                "activation", self.n_campaigns, active.shape[-1]
            )
        out = self._spends(events, rows, active)
        self._count(out.shape[0])
        return out


class BidSource(ABC):
    """Per-(event, campaign) bids consumed by `FirstPriceRule`."""

    n_campaigns: int

    @property
    @abstractmethod
    def max_bid(self) -> float:
        ...

    @abstractmethod
    def bids(self, events: EventStream, rows: Rows) -> np.ndarray:
        ...


class DenseBidTable(BidSource):
    """Precomputed (N, K) bids, looked up by event id."""

    def __init__(self, table: np.ndarray):
        self.table = np.asarray(table, dtype=np.float64)
        self.table.setflags(write=False)
        self.n_campaigns = self.table.shape[1]
        self._max = float(self.table.max()) if self.table.size else 0.0

    @property
    def max_bid(self) -> float:
        return self._max

    def bids(self, events, rows):
        return self.table[events.ids[rows] - 1]


class EmbeddingBids(BidSource):
    """Valuations computed on the fly from event embeddings and campaign vectors."""

    def __init__(self, vectors: np.ndarray):
        self.vectors = np.asarray(vectors, dtype=np.float64)
        self.n_campaigns = self.vectors.shape[0]

    @property
    def max_bid(self) -> float:
        return 1.0

    def bids(self, events, rows):
        return valuation_matrix(events.payloads[rows], self.vectors)


class KeywordBids(BidSource):
    """A (W, K) matrix of constant bids per keyword and advertiser; zero means no bid."""

    def __init__(self, matrix: np.ndarray):
        self.matrix = np.asarray(matrix, dtype=np.float64)
        self.n_campaigns = self.matrix.shape[1]
        self._max = float(self.matrix.max()) if self.matrix.size else 0.0

    @property
    def max_bid(self) -> float:
        return self._max

    def bids(self, events, rows):
        return self.matrix[events.payloads[rows]]


class FirstPriceRule(AuctionRule):
    """
    Highest active bid wins and pays its bid. Ties go to the lowest campaign index; a winning bid of zero or less
    spends nothing.
    """

    def __init__(self, source: BidSource):
        super().__init__(source.n_campaigns)
        self.source = source

    def __repr__(self):
        return f"FirstPriceRule({type(self.source).__name__}, K={self.n_campaigns})"

    @property
    def max_increment(self) -> float:
        return float(np.nextafter(self.source.max_bid, np.inf))

    def _spends(self, events, rows, active):
        bids = self.source.bids(events, rows)
        n = bids.shape[0]
        masked = np.where(np.broadcast_to(active, bids.shape), bids, -np.inf)
        winners = masked.argmax(axis=1)
        index = np.arange(n)
        price = masked[index, winners]
        paid = price > 0
        out = np.zeros_like(bids)
        out[index[paid], winners[paid]] = price[paid]
        return out


class ScaledRule(AuctionRule):
    """Multiplies every increment of `inner` by `factor`; evaluations are counted on `inner`."""

    def __init__(self, inner: AuctionRule, factor: float):
        if factor <= 0:
            raise ValueError(f"factor must be positive, got {factor}.")
        super().__init__(inner.n_campaigns)
        self.inner = inner
        self.factor = factor

    @property
    def max_increment(self) -> float:
        return float(np.nextafter(self.inner.max_increment * self.factor, np.inf))

    @property
    def evaluations(self) -> int:
        return self.inner.evaluations

    def reset_evaluations(self):
        self.inner.reset_evaluations()

    def _count(self, n: int):
        pass

    def _spends(self, events, rows, active):
        return self.inner.spends(events, rows, active) * self.factor


def validate_increments(
    increments: np.ndarray, active: np.ndarray, max_increment: float
):
    """Raises `ContractViolationError` if a block of increments breaks the rule contract."""
    if np.any(increments < 0):
        raise ContractViolationError("Auction rule returned a negative spend increment.")
    if np.any(increments >= max_increment):
        raise ContractViolationError(
            f"Auction rule returned an increment of {increments.max()}, "
            f"not below its declared per-event bound {max_increment}."
        )
    inactive = ~np.broadcast_to(active, increments.shape)
    if np.any(increments[inactive] != 0):
        raise ContractViolationError("An inactive campaign was charged a nonzero spend.")
