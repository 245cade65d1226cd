from pathlib import Path
from typing import List
from typing import Optional

from pydantic import Field
from pydantic import root_validator
from pydantic import validator

from _capsim_sdk.bidlog.models import DayShiftConfig
from _capsim_sdk.core.models import Model
from _capsim_sdk.enums import ExperimentName
from _capsim_sdk.estimator.models import EstimatorConfig
from _capsim_sdk.synthetic.models import SyntheticConfig


class TrajectoryComparison(Model):
    """
    Final spends of an estimated trajectory scored against the sequential truth.

    **Fields**:

    * **relative_errors**: `List[Optional[float]]` - |s - s_hat| / s per campaign, `None` where s is 0.
    * **max_error**, **median_error**, **mean_error**: `float` - Statistics over the non-excluded campaigns.
    * **weighted_error**: `float` - Spend-weighted relative error.
    * **capping_time_deltas**: `List[Optional[int]]` - Estimated minus true capping time, `None` unless both capped.
    * **capping_agreement**: `float` - Fraction of campaigns whose capped/uncapped status matches.
    * **n_excluded**: `int` - Campaigns with zero true spend.
    """

    relative_errors: List[Optional[float]]
    max_error: Optional[float]
    median_error: Optional[float]
    mean_error: Optional[float]
    weighted_error: Optional[float]
    capping_time_deltas: List[Optional[int]]
    capping_agreement: float
    n_excluded: int


class HoeffdingConfig(Model):
    """
    * **permutations**: `int` - Random orders drawn. At least 100.
    * **n_points**: `int` - Size of the default t grid.
    * **prefix**: `int` - Prefix length n. Defaults to N // 2.
    * **campaign**: `int` - Campaign examined (1-based). Defaults to the largest spender under `activation`.
    * **activation**: `List[bool]` - Fixed activation. Defaults to all active.
    """

    permutations: int = Field(1000, ge=100)
    n_points: int = Field(10, ge=2)
    prefix: Optional[int] = Field(None, ge=1)
    campaign: Optional[int] = Field(None, ge=1)
    activation: Optional[List[bool]] = None


class HoeffdingRow(Model):
    t: float
    empirical_tail: float
    bound: float

    @property
    def holds(self) -> bool:
        return self.empirical_tail <= self.bound


class HoeffdingTable(Model):
    """Tail frequencies of |S_n - nF| over random orders of the events against 2 exp(-2 N t^2 / C^2)."""

    n: int
    campaign: int
    C: float
    F: float
    permutations: int
    rows: List[HoeffdingRow]

    @property
    def violations(self) -> List[HoeffdingRow]:
        return [r for r in self.rows if not r.holds]


class SmoothnessConfig(Model):
    """Smoothness inequality checked once per entry of `gammas` with a shared `epsilon`."""

    gammas: List[float] = [0.0, 0.5, 1.0, 2.0]
    epsilon: float = Field(0.01, ge=0)
    trials: int = Field(1000, ge=1)
    max_span: Optional[int] = Field(None, ge=1)
    n_activations: int = Field(8, ge=1)


class ExperimentSpec(Model):
    """
    A named experiment plus everything needed to reproduce it.

    **Fields**:

    * **name**: `ExperimentName` - Registered experiment.
    * **instance**: `SyntheticConfig` - Synthetic geometry for experiments that replay a generated instance.
    * **estimator**: `EstimatorConfig` - Capping-time estimation parameters.
    * **day_shift**: `DayShiftConfig` - Parameters of the day-shift experiment.
    * **hoeffding**: `HoeffdingConfig` - Parameters of the concentration check.
    * **smoothness**: `SmoothnessConfig` - Parameters of the smoothness check.
    * **repetitions**: `int` - Runs, each with its own seed.
    * **seeds**: `List[int]` - Per-repetition seeds. Defaults to `seed, seed + 1, ...`.
    * **rhos**: `List[float]` - Sampling rates swept by `sampling-error`.
    * **sizes**: `List[int]` - Event counts swept by `parallel-vs-sequential`.
    * **refine**: `bool` - Refine estimated boundaries in sort2aggregate runs.
    * **bid_log**: `Path` - Bid-log CSV for `day-shift`. A fixture is generated when unset.
    * **out_dir**: `Path` - Directory receiving `<name>.csv` and `<name>.summary.json`.
    """

    name: ExperimentName
    instance: SyntheticConfig = SyntheticConfig()
    estimator: EstimatorConfig = EstimatorConfig()
    day_shift: DayShiftConfig = DayShiftConfig()
    hoeffding: HoeffdingConfig = HoeffdingConfig()
    smoothness: SmoothnessConfig = SmoothnessConfig()
    repetitions: int = Field(1, ge=1)
    seed: int = 0
    seeds: Optional[List[int]] = None
    rhos: List[float] = [0.001, 0.01, 0.1]
    sizes: List[int] = [1_000, 10_000, 100_000]
    refine: bool = True
    bid_log: Optional[Path] = None
    out_dir: Path = Path("capsim-results")

    @validator("rhos", each_item=True)
    def _validate_rho(cls, value):  # noqa
        if not 0 < value <= 1:
            raise ValueError(f"sampling rates must lie in (0, 1], got {value}.")
        return value

    @validator("sizes", each_item=True)
    def _validate_size(cls, value):  # noqa
        if value < 1:
            raise ValueError(f"event counts must be >= 1, got {value}.")
        return value

    @root_validator(skip_on_failure=True)
    def _derive_seeds(cls, values):  # noqa
        seeds = values.get("seeds")
        repetitions = values["repetitions"]
        if seeds is None:
            values["seeds"] = [values["seed"] + r for r in range(repetitions)]
        elif not seeds:
            raise ValueError("seeds must not be empty.")
        elif repetitions not in (1, len(seeds)):
            raise ValueError(
                f"repetitions={repetitions} does not match the {len(seeds)} seeds given."
            )
        else:
            values["repetitions"] = len(seeds)
        return values


class ExperimentResult(Model):
    """Paths written by one experiment run and the summary stored in its JSON file."""

    name: ExperimentName
    csv_path: Path
    summary_path: Path
    n_rows: int
    summary: dict
