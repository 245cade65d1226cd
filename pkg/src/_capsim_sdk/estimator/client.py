from typing import Callable
from typing import List
from typing import Optional
from typing import Tuple

import numpy as np

from _capsim_sdk.estimator.estimate import estimate_pi
from _capsim_sdk.estimator.estimate import pi_to_capping_schedule
from _capsim_sdk.estimator.estimate import vi_residual
from _capsim_sdk.estimator.models import ConvergenceTrace
from _capsim_sdk.estimator.models import EstimatorConfig
from _capsim_sdk.estimator.models import PiVector
from _capsim_sdk.model.instance import Instance
from _capsim_sdk.model.models import CappingEvent
from _capsim_sdk.model.rules import AuctionRule


class EstimatorClient:
    """
    Estimation of scaled capping times pi.

    Usage example:

        >>> pi, trace = engine.estimator.estimate(instance, EstimatorConfig(rho=0.01, T=50))
        >>> engine.estimator.schedule(pi, instance.n_events)
    """

    def __init__(self, parent):
        self._parent = parent

    def estimate(
        self,
        instance: Instance,
        cfg: Optional[EstimatorConfig] = None,
        on_step: Optional[Callable[[np.ndarray], None]] = None,
        rule: Optional[AuctionRule] = None,
    ) -> Tuple[PiVector, ConvergenceTrace]:
        return estimate_pi(
            instance.events,
            instance.campaigns,
            rule or self._parent.model.rule(instance),
            cfg,
            on_step=on_step,
        )

    def residual(
        self,
        instance: Instance,
        pi,
        mc_draws: int = 8,
        seed: int = 0,
        per_event: bool = False,
        rule: Optional[AuctionRule] = None,
    ) -> np.ndarray:
        return vi_residual(
            pi,
            instance.events,
            instance.campaigns,
            rule or self._parent.model.rule(instance),
            mc_draws,
            seed,
            per_event=per_event,
            reducer=self._parent.reducer,
        )

    def schedule(self, pi, n_events: int, survival_tolerance: float = 0.0) -> List[CappingEvent]:
        return pi_to_capping_schedule(pi, n_events, survival_tolerance)
