from pathlib import Path
from typing import Optional
from typing import Sequence
from typing import Union

from _capsim_sdk.experiments.hoeffding import hoeffding_suite
from _capsim_sdk.experiments.metrics import compare_trajectories
from _capsim_sdk.experiments.models import ExperimentResult
from _capsim_sdk.experiments.models import ExperimentSpec
from _capsim_sdk.experiments.models import HoeffdingConfig
from _capsim_sdk.experiments.models import HoeffdingTable
from _capsim_sdk.experiments.models import TrajectoryComparison
from _capsim_sdk.experiments.run import run_experiment
from _capsim_sdk.experiments.spec import load_spec_file
from _capsim_sdk.experiments.spec import spec_from_mapping
from _capsim_sdk.model.instance import Instance
from _capsim_sdk.model.models import Trajectory


class ExperimentsClient:
    """
    Registered experiments and the metrics they report.

    Usage example:

        >>> spec = engine.experiments.spec(name="s2a-vs-truth", instance_n_events="10000", repetitions="3")
        >>> result = engine.experiments.run(spec)
        >>> result.csv_path
        PosixPath('capsim-results/s2a-vs-truth.csv')
    """

    def __init__(self, parent):
        self._parent = parent

    def spec(self, **values) -> ExperimentSpec:
        return spec_from_mapping(values)

    def load_spec(self, path: Union[str, Path], **overrides) -> ExperimentSpec:
        return load_spec_file(path, **overrides)

    def run(self, spec: ExperimentSpec) -> ExperimentResult:
        return run_experiment(
            spec, reducer=self._parent.reducer, table_cap=self._parent.settings.table_cap
        )

    def compare(self, truth: Trajectory, estimate: Trajectory) -> TrajectoryComparison:
        return compare_trajectories(truth, estimate)

    def hoeffding(
        self,
        instance: Instance,
        t_grid: Optional[Sequence[float]] = None,
        cfg: Optional[HoeffdingConfig] = None,
        seed: int = 0,
    ) -> HoeffdingTable:
        return hoeffding_suite(
            instance.events,
            self._parent.model.rule(instance),
            t_grid=t_grid,
            cfg=cfg,
            seed=seed,
            reducer=self._parent.reducer,
        )
