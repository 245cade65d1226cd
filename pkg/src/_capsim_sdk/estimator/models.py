from typing import Iterator
from typing import List
from typing import Optional

import numpy as np
from pydantic import Field
from pydantic import root_validator
from pydantic import validator

from _capsim_sdk.core.models import frozen_array
from _capsim_sdk.core.models import Model
from _capsim_sdk.enums import InitMode
from _capsim_sdk.enums import StepSchedule


class PiVector(Model):
    """Scaled capping times, `pi[c - 1]` approximating N^c / N; 1 means the campaign survives the horizon."""

    pi: np.ndarray

    @validator("pi", pre=True)
    def _validate_pi(cls, value):  # noqa
        value = np.asarray(value, dtype=np.float64).reshape(-1)
        if np.any(value < 0) or np.any(value > 1):
            raise ValueError("pi must lie in [0, 1] componentwise.")
        return frozen_array(value)

    def __len__(self):
        return self.pi.shape[0]


class EstimatorConfig(Model):
    """
    Parameters of the stochastic projected fixed-point iteration on pi.

    **Fields**:

    * **rho**: `float` - Fraction of events sampled once and swept `T` times. Defaults to 0.01.
    * **eta**: `float` - Step size. Defaults to 0.01.
    * **T**: `int` - Number of sweeps over the sample. Defaults to 50.
    * **seed**: `int` - Seeds the sample and the activation draws.
    * **batch**: `int` - Events per update; the increments are averaged over the batch. `1` updates per event.
    * **init**: `InitMode` - `ones` starts every campaign at 1; `warm-start` starts from `warm_start`.
    * **warm_start**: `List[float]` - Initial pi for `warm-start`.
    * **step_schedule**: `StepSchedule` - `constant` or `inverse-sqrt` (eta / sqrt(sweep)).
    * **tail_average**: `int` - Average the end-of-sweep iterates of the last `tail_average` sweeps. `0` returns the
        last iterate.
    * **tolerance**: `float` - Stop early once the complementarity violation stays below this value for 3
        consecutive sweeps. `None` always runs `T` sweeps.
    * **survival_tolerance**: `float` - Campaigns with pi at or above `1 - survival_tolerance` are read as never
        capping when pi is turned into a capping schedule. Defaults to 0.02.
    """

    rho: float = Field(0.01, gt=0, le=1)
    eta: float = Field(0.01, gt=0)
    T: int = Field(50, ge=1)
    seed: int = 0
    batch: int = Field(1, ge=1)
    init: InitMode = InitMode.ONES
    warm_start: Optional[List[float]] = None
    step_schedule: StepSchedule = StepSchedule.CONSTANT
    tail_average: int = Field(0, ge=0)
    tolerance: Optional[float] = Field(None, gt=0)
    survival_tolerance: float = Field(0.02, ge=0, lt=1)

    @root_validator(skip_on_failure=True)
    def _check_warm_start(cls, values):  # noqa
        if values["init"] == InitMode.WARM_START:
            warm = values.get("warm_start")
            if not warm:
                raise ValueError("init=warm-start requires warm_start values.")
            if any(not 0 <= p <= 1 for p in warm):
                raise ValueError("warm_start values must lie in [0, 1].")
        return values

    def warm_started(self, pi) -> "EstimatorConfig":
        return self.copy(
            update={
                "init": InitMode.WARM_START.value,
                "warm_start": [float(p) for p in np.asarray(pi).reshape(-1)],
            }
        )


class TraceRow(Model):
    sweep: int
    campaign: int
    pi: float
    residual: float


class ConvergenceTrace(Model):
    """
    Per-sweep diagnostics of a pi estimation run.

    * **pi**: (sweeps, K) end-of-sweep iterates.
    * **residual**: (sweeps, K) per-event residual, the sweep's mean spend minus b / N.
    * **complementarity**: (sweeps,) complementarity violation of each end-of-sweep iterate against its residual.
    * **mean_abs_delta**: (sweeps,) mean absolute update direction over the sweep.
    """

    pi: np.ndarray
    residual: np.ndarray
    complementarity: np.ndarray
    mean_abs_delta: np.ndarray

    @property
    def n_sweeps(self) -> int:
        return self.pi.shape[0]

    def sweeps_to_tolerance(self, tolerance: float) -> Optional[int]:
        """First sweep (1-based) whose complementarity violation is below `tolerance`, `None` if none is."""
        hits = np.flatnonzero(self.complementarity < tolerance)
        return int(hits[0]) + 1 if hits.size else None

    def rows(self) -> Iterator[TraceRow]:
        for t in range(self.n_sweeps):
            for c in range(self.pi.shape[1]):
                yield TraceRow(
                    sweep=t + 1,
                    campaign=c + 1,
                    pi=float(self.pi[t, c]),
                    residual=float(self.residual[t, c]),
                )
