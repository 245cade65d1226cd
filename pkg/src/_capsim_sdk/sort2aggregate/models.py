from typing import List
from typing import Optional

import numpy as np
from pydantic import Field

from _capsim_sdk.core.models import Model
from _capsim_sdk.enums import BoundaryIssue
from _capsim_sdk.estimator.models import ConvergenceTrace
from _capsim_sdk.estimator.models import PiVector
from _capsim_sdk.model.models import CappingEvent
from _capsim_sdk.model.models import Trajectory


class PlanSegment(Model):
    """Events `start`..`end` (1-based, inclusive) aggregated under `activation`; `capper` is deactivated after `end`."""

    start: int = Field(ge=1)
    end: int = Field(ge=1)
    activation: np.ndarray
    capper: Optional[int] = None

    @property
    def length(self) -> int:
        return self.end - self.start + 1


class BoundaryFlag(Model):
    """
    A departure from the estimated schedule found during refinement.

    * **out-of-order**: the campaign reached its budget ahead of the next scheduled capper.
    * **unscheduled**: the campaign reached its budget but was not in the schedule.
    * **not-reached**: the campaign was scheduled but its budget is not reached before N; it stays active and `time`
        is N.
    * **already-exhausted**: the campaign reached its budget on the same event as another one and was deactivated on
        the following event.
    """

    campaign: int
    time: int
    issue: BoundaryIssue
    spend: float
    budget: float


class SegmentPlan(Model):
    """
    A deactivation schedule cutting [1..N] into constant-activation segments.

    **Fields**:

    * **n_events**: `int` - N.
    * **n_campaigns**: `int` - K.
    * **boundaries**: `List[CappingEvent]` - Strictly increasing deactivation times.
    * **segments**: `List[PlanSegment]` - One per boundary plus a final segment to N when the last boundary is
        before N.
    * **flags**: `List[BoundaryFlag]` - Issues found during refinement.
    * **cached_sums**: `List[Optional[numpy.ndarray]]` - Segment spend sums already computed by refinement.
    """

    n_events: int = Field(ge=1)
    n_campaigns: int = Field(ge=1)
    boundaries: List[CappingEvent]
    segments: List[PlanSegment]
    flags: List[BoundaryFlag] = []
    cached_sums: Optional[List[Optional[np.ndarray]]] = None

    @property
    def is_refined(self) -> bool:
        return self.cached_sums is not None


class ConsistencyCheck(Model):
    """
    Reconstructed spend of `campaign` at its boundary `time` against [lower, upper]. `time` is `None` for a
    campaign the plan never deactivates, which is only checked against `upper`.
    """

    campaign: int
    time: Optional[int]
    spend: float
    budget: float
    lower: float
    upper: float
    passed: bool
    discrepancy: float = Field(ge=0)


class EvaluationCount(Model):
    estimation: int
    refinement: int
    aggregation: int

    @property
    def total(self) -> int:
        return self.estimation + self.refinement + self.aggregation


class AggregateReport(Model):
    trajectory: Trajectory
    pi: PiVector
    trace: ConvergenceTrace
    plan: SegmentPlan
    segment_sums: np.ndarray
    checks: List[ConsistencyCheck]
    tolerance: float
    evaluations: EvaluationCount

    @property
    def consistent(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def failed_checks(self) -> List[ConsistencyCheck]:
        return [c for c in self.checks if not c.passed]


class CostEstimate(Model):
    """Predicted wall-clock seconds and auction evaluations of the estimate-then-aggregate pipeline."""

    estimation_seconds: float
    aggregation_seconds: float
    sequential_seconds: float
    estimation_evaluations: int
    aggregation_evaluations: int

    @property
    def total_seconds(self) -> float:
        return self.estimation_seconds + self.aggregation_seconds

    @property
    def speedup(self) -> float:
        return self.sequential_seconds / self.total_seconds
