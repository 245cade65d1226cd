from pathlib import Path
from typing import Iterable
from typing import Optional
from typing import Union

import numpy as np

from _capsim_sdk.model.diagnostics import AssumptionReport
from _capsim_sdk.model.diagnostics import check_smoothness
from _capsim_sdk.model.diagnostics import diagnose_assumptions
from _capsim_sdk.model.diagnostics import estimate_C
from _capsim_sdk.model.diagnostics import SmoothnessResult
from _capsim_sdk.model.instance import Instance
from _capsim_sdk.model.models import AssumptionParams
from _capsim_sdk.model.rules import AuctionRule


class ModelClient:
    """
    Instance files, auction rules and assumption diagnostics.

    Usage example:

        >>> engine = capsim.Engine()
        >>> instance = engine.model.load("instance.npz")
        >>> engine.model.estimate_C(instance)
    """

    def __init__(self, parent):
        self._parent = parent

    def load(self, path: Union[str, Path]) -> Instance:
        return Instance.load(path)

    def save(self, instance: Instance, path: Union[str, Path]) -> Path:
        return instance.save(path)

    def rule(self, instance: Instance) -> AuctionRule:
        """First-price rule of `instance`, with a dense valuation table when it fits under `settings.table_cap`."""
        return instance.rule(self._parent.settings.table_cap)

    def estimate_C(
        self,
        instance: Instance,
        activations: Optional[Iterable] = None,
        positions=None,
        rule: Optional[AuctionRule] = None,
    ) -> float:
        """N times the largest increment seen; the all-active activation is used when `activations` is unset."""
        if activations is None:
            activations = [np.ones(instance.n_campaigns, dtype=bool)]
        return estimate_C(
            instance.events,
            rule or self.rule(instance),
            activations,
            positions=positions,
            reducer=self._parent.reducer,
        )

    def check_smoothness(
        self,
        instance: Instance,
        gamma: float,
        epsilon: float,
        trials: int = 1000,
        seed: int = 0,
        max_span: Optional[int] = None,
    ) -> SmoothnessResult:
        return check_smoothness(
            instance.events, self.rule(instance), gamma, epsilon, trials, seed, max_span=max_span
        )

    def diagnose(
        self,
        instance: Instance,
        params: AssumptionParams,
        trials: int = 1000,
        seed: int = 0,
        max_span: Optional[int] = None,
    ) -> AssumptionReport:
        return diagnose_assumptions(
            instance.events,
            self.rule(instance),
            params,
            trials=trials,
            seed=seed,
            max_span=max_span,
            reducer=self._parent.reducer,
        )
