from typing import List
from typing import Optional

import numpy as np
from pydantic import Field
from pydantic import root_validator
from pydantic import validator

from _capsim_sdk.core.models import frozen_array
from _capsim_sdk.core.models import Model
from _capsim_sdk.enums import RateBasis
from _capsim_sdk.model.models import Trajectory


class RateBasisConfig(Model):
    """
    How the expected per-event spend F is estimated for the next segment.

    **Fields**:

    * **kind**: `RateBasis` - `exact-remaining-mean` (mean over all unconsumed events, the default),
        `subsampled` (mean over a uniform subsample of the unconsumed events) or `consumed-prefix-mean` (mean over the
        events already consumed, falling back to the exact remaining mean before any event is consumed).
    * **rate**: `float` - Subsample rate in (0, 1] for `subsampled`. A rate of 1 is the exact remaining mean.
    * **seed**: `int` - Subsample seed.
    """

    kind: RateBasis = RateBasis.EXACT_REMAINING
    rate: float = Field(1.0, gt=0, le=1)
    seed: int = 0


class RateEstimate(Model):
    F: np.ndarray
    basis: RateBasis
    n_sampled: int

    @validator("F", pre=True)
    def _freeze(cls, value):  # noqa
        return frozen_array(value, dtype=np.float64)


class SimulatedSegment(Model):
    """
    Events `start`..`end` (1-based, inclusive) replayed under `activation`. `capper` is the campaign (1-based)
    predicted to cap out at `end`, `None` for a final segment run to the horizon.
    """

    start: int = Field(ge=1)
    end: int = Field(ge=1)
    activation: np.ndarray
    capper: Optional[int] = None
    spend: np.ndarray

    @root_validator(skip_on_failure=True)
    def _check_bounds(cls, values):  # noqa
        if values["end"] < values["start"]:
            raise ValueError("Segment end precedes its start.")
        return values


class ParallelSimReport(Model):
    trajectory: Trajectory
    segments: List[SimulatedSegment]
    basis: RateBasisConfig
    evaluations: int

    @property
    def iterations(self) -> int:
        return len(self.segments)
