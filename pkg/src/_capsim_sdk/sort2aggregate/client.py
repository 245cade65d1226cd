from typing import Optional
from typing import Sequence

from _capsim_sdk.estimator.models import EstimatorConfig
from _capsim_sdk.model.instance import Instance
from _capsim_sdk.model.rules import AuctionRule
from _capsim_sdk.sort2aggregate.aggregate import build_segment_plan
from _capsim_sdk.sort2aggregate.aggregate import cost_model
from _capsim_sdk.sort2aggregate.aggregate import refine_boundaries
from _capsim_sdk.sort2aggregate.aggregate import ScheduleEntry
from _capsim_sdk.sort2aggregate.aggregate import sort2aggregate
from _capsim_sdk.sort2aggregate.models import AggregateReport
from _capsim_sdk.sort2aggregate.models import CostEstimate
from _capsim_sdk.sort2aggregate.models import SegmentPlan


class Sort2AggregateClient:
    """
    Estimate capping times, refine them, aggregate spends per segment.

    Usage example:

        >>> report = engine.s2a.run(instance, EstimatorConfig(rho=0.01))
        >>> report.consistent, report.evaluations.total
    """

    def __init__(self, parent):
        self._parent = parent

    def run(
        self,
        instance: Instance,
        cfg: Optional[EstimatorConfig] = None,
        refine: bool = True,
        window_fraction: float = 0.05,
        tolerance: Optional[float] = None,
        rule: Optional[AuctionRule] = None,
    ) -> AggregateReport:
        return sort2aggregate(
            instance.events,
            instance.campaigns,
            rule or self._parent.model.rule(instance),
            cfg,
            refine=refine,
            window_fraction=window_fraction,
            tolerance=tolerance,
            reducer=self._parent.reducer,
        )

    def plan(
        self,
        instance: Instance,
        schedule: Sequence[ScheduleEntry],
        refine: bool = False,
        window_fraction: float = 0.05,
        rule: Optional[AuctionRule] = None,
    ) -> SegmentPlan:
        """Segment plan for an explicit deactivation schedule, optionally refined against the events."""
        plan = build_segment_plan(schedule, instance.n_campaigns, instance.n_events)
        if not refine:
            return plan
        return refine_boundaries(
            instance.events,
            instance.campaigns,
            rule or self._parent.model.rule(instance),
            plan,
            window_fraction=window_fraction,
            reducer=self._parent.reducer,
        )

    def cost(self, N: int, A: float, T: int, rho: float, n_cores: Optional[int] = None) -> CostEstimate:
        return cost_model(N, A, T, rho, n_cores or self._parent.settings.workers)
