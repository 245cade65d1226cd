from typing import Optional

from _capsim_sdk.model.instance import Instance
from _capsim_sdk.synthetic.generate import calibrate_base_budget
from _capsim_sdk.synthetic.generate import generate_instance
from _capsim_sdk.synthetic.models import CalibrationResult
from _capsim_sdk.synthetic.models import SyntheticConfig


class SyntheticClient:
    def __init__(self, parent):
        self._parent = parent

    def generate(self, cfg: Optional[SyntheticConfig] = None, **kwargs) -> Instance:
        """
        Synthetic embedding instance. Keyword arguments build a `SyntheticConfig` when `cfg` is not given.

        Usage example:

            >>> instance = engine.synthetic.generate(n_events=100_000, n_campaigns=20, seed=3)
        """
        cfg = cfg or SyntheticConfig(**kwargs)
        return generate_instance(
            cfg, table_cap=self._parent.settings.table_cap, reducer=self._parent.reducer
        )

    def calibrate(
        self,
        instance: Instance,
        target_fraction: float = 0.5,
        tolerance: float = 0.1,
        low: Optional[float] = None,
        high: Optional[float] = None,
    ) -> CalibrationResult:
        return calibrate_base_budget(
            instance.events,
            self._parent.model.rule(instance),
            target_fraction=target_fraction,
            tolerance=tolerance,
            low=low,
            high=high,
            reducer=self._parent.reducer,
        )
