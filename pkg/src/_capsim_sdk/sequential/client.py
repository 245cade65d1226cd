from typing import Optional

from _capsim_sdk.model.instance import Instance
from _capsim_sdk.model.models import Trajectory
from _capsim_sdk.model.rules import AuctionRule
from _capsim_sdk.sequential.models import SequentialConfig
from _capsim_sdk.sequential.simulate import naive_sampled_sequential
from _capsim_sdk.sequential.simulate import simulate_sequential


class SequentialClient:
    """
    Exact event-by-event replay and its naive subsampled baseline.

    Usage example:

        >>> trajectory = engine.sequential.simulate(instance)
        >>> trajectory.capping_order
    """

    def __init__(self, parent):
        self._parent = parent

    def simulate(
        self,
        instance: Instance,
        cfg: Optional[SequentialConfig] = None,
        rule: Optional[AuctionRule] = None,
    ) -> Trajectory:
        return simulate_sequential(
            instance.events,
            instance.campaigns,
            rule or self._parent.model.rule(instance),
            cfg,
            reducer=self._parent.reducer,
        )

    def naive(
        self,
        instance: Instance,
        rho: float,
        seed: int = 0,
        cfg: Optional[SequentialConfig] = None,
        rule: Optional[AuctionRule] = None,
    ) -> Trajectory:
        """Replay of a `rho` fraction of the events with increments scaled by 1 / rho."""
        return naive_sampled_sequential(
            instance.events,
            instance.campaigns,
            rule or self._parent.model.rule(instance),
            rho,
            seed,
            cfg,
            reducer=self._parent.reducer,
        )
