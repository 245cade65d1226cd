from typing import Iterator
from typing import List
from typing import Optional
from typing import Union

import numpy as np
from pydantic import Field
from pydantic import root_validator
from pydantic import validator

from _capsim_sdk.core.models import frozen_array
from _capsim_sdk.core.models import Model
from _capsim_sdk.enums import PayloadKind
from _capsim_sdk.exceptions import DimensionMismatchError


class Event(Model):
    """
    A single auction opportunity.

    **Fields**:

    * **id**: `int` - Position of the event in its source stream, starting at 1.
    * **payload**: embedding vector (`numpy.ndarray`) or keyword index (`int`), interpreted by the auction rule.
    """

    id: int = Field(ge=1)
    payload: Union[np.ndarray, int]


class EventStream(Model):
    """
    An ordered, immutable sequence of N events.

    Payloads are stored column-wise: an (N, d) float matrix for embedding events or an (N,) integer vector of keyword
    indexes for keyword events. `ids` holds each event's id in the stream it was drawn from, so a sub-stream produced
    by `take()` still knows where its events came from.
    """

    kind: PayloadKind
    payloads: np.ndarray
    ids: np.ndarray

    @root_validator(pre=True)
    def _freeze(cls, values):  # noqa
        kind = PayloadKind(values.get("kind", PayloadKind.EMBEDDING))
        dtype = np.float64 if kind == PayloadKind.EMBEDDING else np.int64
        payloads = np.asarray(values["payloads"], dtype=dtype)
        if kind == PayloadKind.EMBEDDING and payloads.ndim == 1:
            payloads = payloads.reshape(-1, 1)
        ids = values.get("ids")
        if ids is None:
            ids = np.arange(1, payloads.shape[0] + 1)
        values["payloads"] = frozen_array(payloads)
        values["ids"] = frozen_array(ids, dtype=np.int64)
        return values

    @root_validator(skip_on_failure=True)
    def _check_lengths(cls, values):  # noqa
        if values["ids"].shape[0] != values["payloads"].shape[0]:
            raise ValueError("ids and payloads must have one entry per event.")
        return values

    def __len__(self):
        return self.payloads.shape[0]

    @property
    def n_events(self) -> int:
        return len(self)

    @property
    def dim(self) -> int:
        return self.payloads.shape[1] if self.kind == PayloadKind.EMBEDDING else 1

    def take(self, positions) -> "EventStream":
        """Sub-stream of the events at `positions` (0-based, kept in the given order)."""
        positions = np.asarray(positions, dtype=np.int64)
        return EventStream(
            kind=self.kind, payloads=self.payloads[positions], ids=self.ids[positions]
        )

    def event(self, position: int) -> Event:
        payload = self.payloads[position]
        if self.kind == PayloadKind.KEYWORD:
            payload = int(payload)
        return Event(id=int(self.ids[position]), payload=payload)

    def __iter__(self) -> Iterator[Event]:
        for i in range(len(self)):
            yield self.event(i)

    @classmethod
    def from_events(cls, events: List[Event], kind: PayloadKind) -> "EventStream":
        return cls(
            kind=kind,
            payloads=np.array([e.payload for e in events]),
            ids=np.array([e.id for e in events], dtype=np.int64),
        )


class CampaignSet(Model):
    """K campaigns identified by position (campaign `c` is `budgets[c - 1]`)."""

    budgets: np.ndarray

    @validator("budgets", pre=True)
    def _validate_budgets(cls, value):  # noqa
        value = np.asarray(value, dtype=np.float64).reshape(-1)
        if value.shape[0] < 1:
            raise ValueError("A campaign set needs at least one campaign.")
        if not np.all(value > 0):
            raise ValueError("Every budget must be strictly positive.")
        return frozen_array(value)

    def __len__(self):
        return self.budgets.shape[0]

    @property
    def n_campaigns(self) -> int:
        return len(self)


class ActivationVector(Model):
    bits: np.ndarray

    @validator("bits", pre=True)
    def _validate_bits(cls, value):  # noqa
        return frozen_array(np.asarray(value).reshape(-1), dtype=bool)

    def __len__(self):
        return self.bits.shape[0]

    @classmethod
    def all_active(cls, n_campaigns: int) -> "ActivationVector":
        return cls(bits=np.ones(n_campaigns, dtype=bool))

    def as_tuple(self):
        return tuple(int(b) for b in self.bits)


class SpendState(Model):
    spends: np.ndarray
    event_index: int = Field(0, ge=0)

    @validator("spends", pre=True)
    def _validate_spends(cls, value):  # noqa
        value = np.asarray(value, dtype=np.float64).reshape(-1)
        if np.any(value < 0):
            raise ValueError("Spends must be nonnegative.")
        return frozen_array(value)


class AssumptionParams(Model):
    C: float = Field(gt=0)
    gamma: float = Field(gt=0)
    delta: float = Field(gt=0, lt=1)
    epsilon: float = Field(gt=0)


class CappingEvent(Model):
    """Campaign `campaign` (1-based) capped out at event `time` (1-based)."""

    campaign: int = Field(ge=1)
    time: int = Field(ge=1)


class SpendCheckpoint(Model):
    event_index: int
    spends: np.ndarray


class Trajectory(Model):
    """
    Outcome of a replay.

    **Fields**:

    * **n_events**: `int` - Number of events replayed.
    * **final_spends**: `numpy.ndarray` - Spend per campaign after the last event.
    * **capping_times**: `List[Optional[int]]` - Per campaign, the first event index at which its spend reached its
        budget, or `None` if it never did.
    * **capping_order**: `List[CappingEvent]` - Capped campaigns sorted by time, ties by campaign.
    * **spend_checkpoints**: `List[SpendCheckpoint]` - Sampled cumulative spends, empty unless requested.
    """

    n_events: int
    final_spends: np.ndarray
    capping_times: List[Optional[int]]
    capping_order: List[CappingEvent] = []
    spend_checkpoints: List[SpendCheckpoint] = []

    @validator("final_spends", pre=True)
    def _freeze_spends(cls, value):  # noqa
        return frozen_array(value, dtype=np.float64)

    @root_validator(skip_on_failure=True)
    def _derive_order(cls, values):  # noqa
        times = values["capping_times"]
        if len(times) != values["final_spends"].shape[0]:
            raise DimensionMismatchError(
                "capping_times", values["final_spends"].shape[0], len(times)
            )
        values["capping_order"] = [
            CappingEvent(campaign=c + 1, time=t)
            for t, c in sorted((t, c) for c, t in enumerate(times) if t is not None)
        ]
        return values

    @property
    def n_campaigns(self) -> int:
        return self.final_spends.shape[0]

    @property
    def n_capped(self) -> int:
        return len(self.capping_order)

    def capped_fraction(self) -> float:
        return self.n_capped / self.n_campaigns

    def capping_fractions(self) -> np.ndarray:
        """Capping time over N per campaign, 1.0 for campaigns that never capped."""
        return np.array(
            [1.0 if t is None else t / self.n_events for t in self.capping_times]
        )

    def activation_at(self, n: int) -> np.ndarray:
        """Activation in force for event n + 1, i.e. after `n` events were processed."""
        return np.array([t is None or n < t for t in self.capping_times])
