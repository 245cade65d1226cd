from typing import Dict
from typing import List
from typing import Optional

import numpy as np
from pydantic import Field
from pydantic import root_validator
from pydantic import validator

from _capsim_sdk.core.models import CSVModel
from _capsim_sdk.core.models import frozen_array
from _capsim_sdk.core.models import Model
from _capsim_sdk.enums import DayShiftMethod
from _capsim_sdk.estimator.models import EstimatorConfig


class BidRecord(CSVModel):
    """
    One row of a bid log: `count` auctions on `keyword_id` where `advertiser_id` bid `bid` during `day`.

    Expected header: `day,advertiser_id,keyword_id,bid,count`.
    """

    day: int = Field(csv_aliases=["day", "date"])
    advertiser_id: str = Field(csv_aliases=["advertiser_id", "advertiser", "account_id"])
    keyword_id: str = Field(csv_aliases=["keyword_id", "keyword", "phrase_id"])
    bid: float = Field(gt=0, csv_aliases=["bid", "bid_amount"])
    count: int = Field(gt=0, csv_aliases=["count", "n_auctions"])


class BidLog(Model):
    """
    A parsed bid log stored column-wise.

    Advertiser and keyword ids are mapped to dense 0-based indexes into `advertiser_ids` and `keyword_ids`, which are
    sorted numerically when every id is an integer and lexicographically otherwise.
    """

    day: np.ndarray
    advertiser: np.ndarray
    keyword: np.ndarray
    bid: np.ndarray
    count: np.ndarray
    advertiser_ids: List[str]
    keyword_ids: List[str]

    @root_validator(pre=True)
    def _freeze(cls, values):  # noqa
        for name in ("day", "advertiser", "keyword", "count"):
            values[name] = frozen_array(values.get(name, []), dtype=np.int64)
        values["bid"] = frozen_array(values.get("bid", []), dtype=np.float64)
        return values

    def __len__(self):
        return self.day.shape[0]

    @property
    def n_records(self) -> int:
        return len(self)

    @property
    def n_advertisers(self) -> int:
        return len(self.advertiser_ids)

    @property
    def n_keywords(self) -> int:
        return len(self.keyword_ids)

    @property
    def days(self) -> List[int]:
        return sorted(int(d) for d in np.unique(self.day))


class KeywordModel(Model):
    """
    One day of keyword auctions with constant bids.

    **Fields**:

    * **day**: `int` - Day the model was built from.
    * **frequencies**: `numpy.ndarray` - (W,) probability of each keyword, proportional to its auction count.
    * **bids**: `numpy.ndarray` - (W, K) count-weighted mean bid per keyword and advertiser, 0 where the advertiser
        never bid on the keyword.
    * **keyword_ids**: `List[str]` - Source id of each keyword row.
    * **advertiser_ids**: `List[str]` - Source id of each advertiser column.
    """

    day: int
    frequencies: np.ndarray
    bids: np.ndarray
    keyword_ids: List[str]
    advertiser_ids: List[str]

    @validator("frequencies", pre=True)
    def _freeze_frequencies(cls, value):  # noqa
        return frozen_array(value, dtype=np.float64)

    @validator("bids", pre=True)
    def _freeze_bids(cls, value):  # noqa
        return frozen_array(value, dtype=np.float64)

    @root_validator(skip_on_failure=True)
    def _check_shapes(cls, values):  # noqa
        frequencies, bids = values["frequencies"], values["bids"]
        W, K = len(values["keyword_ids"]), len(values["advertiser_ids"])
        if frequencies.shape != (W,) or bids.shape != (W, K):
            raise ValueError(
                f"Expected frequencies of shape ({W},) and bids of shape ({W}, {K})."
            )
        if W and not np.isclose(frequencies.sum(), 1.0):
            raise ValueError("Keyword frequencies must sum to 1.")
        if np.any(frequencies < 0) or np.any(bids < 0):
            raise ValueError("Frequencies and bids must be nonnegative.")
        return values

    @property
    def n_keywords(self) -> int:
        return self.bids.shape[0]

    @property
    def n_advertisers(self) -> int:
        return self.bids.shape[1]


class BidLogManifest(Model):
    """Exact contents of a generated bid-log fixture; `keyword_counts[day][keyword_id]` sums the auction counts."""

    n_records: int
    days: List[int]
    n_advertisers: int
    n_keywords: int
    keyword_counts: Dict[int, Dict[str, int]]
    seed: int


class CurvePoint(Model):
    rank: int
    campaign: int
    spend_share: float
    cumulative_error: float


class DayShiftConfig(Model):
    """
    Parameters of the day-shift comparison.

    **Fields**:

    * **n1**: `int` - Events replayed for day 1.
    * **n2**: `int` - Events replayed for day 2.
    * **budget**: `float` - Budget shared by every advertiser. Unset, it is calibrated on the day-1 replay.
    * **target_capped_fraction**: `float` - Fraction of advertisers the calibrated budget caps on day 1.
    * **calibration_tolerance**: `float` - Accepted distance of the day-1 capped fraction from the target.
    * **seed**: `int` - Seeds the day-1 stream.
    * **day2_seed**: `int` - Seeds the day-2 stream. Defaults to `seed + 1`.
    * **estimator**: `EstimatorConfig` - Estimation parameters of the warm-started sort2aggregate run.
    * **refine**: `bool` - Refine its estimated boundaries.
    * **day1**: `int` - Bid-log day the day-1 model is built from.
    * **day2**: `int` - Bid-log day of a distinct day-2 model. Unset draws day 2 from the day-1 model.
    """

    n1: int = Field(20_000, ge=1)
    n2: int = Field(30_000, ge=1)
    budget: Optional[float] = Field(None, gt=0)
    target_capped_fraction: float = Field(0.5, gt=0, lt=1)
    calibration_tolerance: float = Field(0.1, gt=0, lt=1)
    seed: int = 0
    day2_seed: Optional[int] = None
    estimator: EstimatorConfig = EstimatorConfig()
    refine: bool = True
    day1: int = 1
    day2: Optional[int] = None

    @property
    def resolved_day2_seed(self) -> int:
        return self.seed + 1 if self.day2_seed is None else self.day2_seed


class MethodScore(Model):
    method: DayShiftMethod
    predicted_spends: np.ndarray
    weighted_error: float
    relative_errors: List[Optional[float]]
    curve: List[CurvePoint]


class DayShiftReport(Model):
    """
    Day-2 spend predictions scored against the day-2 sequential replay.

    `pi_init` holds the day-1 capping fractions that warm-start the estimator; `n_excluded` counts advertisers with no
    day-2 spend, which every relative metric leaves out.
    """

    n1: int
    n2: int
    budgets: np.ndarray
    day1_spends: np.ndarray
    day2_spends: np.ndarray
    day1_capped: int
    day2_capped: int
    pi_init: np.ndarray
    scores: List[MethodScore]
    n_excluded: int
    s2a_consistent: bool

    def score(self, method) -> MethodScore:
        method = DayShiftMethod(method)
        return next(s for s in self.scores if s.method == method)

    @property
    def best_method(self) -> DayShiftMethod:
        return DayShiftMethod(min(self.scores, key=lambda s: s.weighted_error).method)
