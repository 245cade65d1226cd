from _capsim_sdk.bidlog.client import BidLogClient
from _capsim_sdk.core.reduce import ChunkReducer
from _capsim_sdk.core.settings import CapsimSettings
from _capsim_sdk.estimator.client import EstimatorClient
from _capsim_sdk.experiments.client import ExperimentsClient
from _capsim_sdk.model.client import ModelClient
from _capsim_sdk.parallel.client import ParallelClient
from _capsim_sdk.sequential.client import SequentialClient
from _capsim_sdk.sort2aggregate.client import Sort2AggregateClient
from _capsim_sdk.synthetic.client import SyntheticClient


class Engine:
    """
    Entry point to the simulators, estimators and experiments.

    Keyword arguments are `CapsimSettings` fields; anything not passed is read from `CAPSIM_*` environment variables
    or a `.env` file.

    Usage example:

        >>> import capsim
        >>> engine = capsim.Engine(workers=8, log_level="INFO")
        >>> instance = engine.synthetic.generate(n_events=100_000, n_campaigns=20, seed=0)
        >>> truth = engine.sequential.simulate(instance)
        >>> report = engine.s2a.run(instance)
        >>> engine.experiments.compare(truth, report.trajectory).weighted_error
    """

    def __init__(self, **settings_kwargs):
        self._settings = CapsimSettings(**settings_kwargs)
        self._model = ModelClient(self)
        self._sequential = SequentialClient(self)
        self._parallel = ParallelClient(self)
        self._estimator = EstimatorClient(self)
        self._s2a = Sort2AggregateClient(self)
        self._synthetic = SyntheticClient(self)
        self._bidlog = BidLogClient(self)
        self._experiments = ExperimentsClient(self)

    def __repr__(self):
        return f"Engine(chunk_size={self._settings.chunk_size}, workers={self._settings.workers})"

    @property
    def settings(self) -> CapsimSettings:
        """The `CapsimSettings` of this engine. Assignments are validated and take effect on the next call."""
        return self._settings

    @property
    def reducer(self) -> ChunkReducer:
        """Chunked reducer built from the current `chunk_size` and `workers` settings."""
        return ChunkReducer.from_settings(self._settings)

    @property
    def model(self) -> ModelClient:
        return self._model

    @property
    def sequential(self) -> SequentialClient:
        return self._sequential

    @property
    def parallel(self) -> ParallelClient:
        return self._parallel

    @property
    def estimator(self) -> EstimatorClient:
        return self._estimator

    @property
    def s2a(self) -> Sort2AggregateClient:
        return self._s2a

    @property
    def synthetic(self) -> SyntheticClient:
        return self._synthetic

    @property
    def bidlog(self) -> BidLogClient:
        return self._bidlog

    @property
    def experiments(self) -> ExperimentsClient:
        return self._experiments
