from typing import Optional

from _capsim_sdk.model.instance import Instance
from _capsim_sdk.model.rules import AuctionRule
from _capsim_sdk.parallel.models import ParallelSimReport
from _capsim_sdk.parallel.models import RateBasisConfig
from _capsim_sdk.parallel.models import RateEstimate
from _capsim_sdk.parallel.simulate import estimate_mean_rate
from _capsim_sdk.parallel.simulate import parallel_simulate


class ParallelClient:
    def __init__(self, parent):
        self._parent = parent

    def simulate(
        self,
        instance: Instance,
        basis: Optional[RateBasisConfig] = None,
        rule: Optional[AuctionRule] = None,
    ) -> ParallelSimReport:
        """Segment-wise replay; each segment runs under a constant activation and is summed in chunks."""
        return parallel_simulate(
            instance.events,
            instance.campaigns,
            rule or self._parent.model.rule(instance),
            basis,
            reducer=self._parent.reducer,
        )

    def estimate_rate(
        self,
        instance: Instance,
        from_index: int,
        activation,
        basis: Optional[RateBasisConfig] = None,
        rule: Optional[AuctionRule] = None,
    ) -> RateEstimate:
        return estimate_mean_rate(
            instance.events,
            from_index,
            activation,
            rule or self._parent.model.rule(instance),
            basis,
            reducer=self._parent.reducer,
        )
