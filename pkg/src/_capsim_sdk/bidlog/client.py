from pathlib import Path
from typing import Optional
from typing import Sequence
from typing import Union

from _capsim_sdk.bidlog.dayshift import day_shift_experiment
from _capsim_sdk.bidlog.ingest import build_keyword_model
from _capsim_sdk.bidlog.ingest import generate_bid_log_fixture
from _capsim_sdk.bidlog.ingest import keyword_first_price_rule
from _capsim_sdk.bidlog.ingest import load_bid_log
from _capsim_sdk.bidlog.ingest import PathOrFile
from _capsim_sdk.bidlog.ingest import read_keyword_model
from _capsim_sdk.bidlog.ingest import sample_event_stream
from _capsim_sdk.bidlog.ingest import write_keyword_model
from _capsim_sdk.bidlog.models import BidLog
from _capsim_sdk.bidlog.models import BidLogManifest
from _capsim_sdk.bidlog.models import DayShiftConfig
from _capsim_sdk.bidlog.models import DayShiftReport
from _capsim_sdk.bidlog.models import KeywordModel
from _capsim_sdk.model.instance import Instance
from _capsim_sdk.model.models import CampaignSet
from _capsim_sdk.model.rules import FirstPriceRule


class BidLogClient:
    """
    Keyword bid logs: ingestion, constant-bid day models and the day-shift comparison.

    Usage example:

        >>> log = engine.bidlog.load("bids.csv")
        >>> day1 = engine.bidlog.keyword_model(log, day=1)
        >>> report = engine.bidlog.day_shift(day1, DayShiftConfig(n1=20_000, n2=30_000))
    """

    def __init__(self, parent):
        self._parent = parent

    def load(self, path: PathOrFile) -> BidLog:
        return load_bid_log(path)

    def keyword_model(self, log: BidLog, day: int) -> KeywordModel:
        return build_keyword_model(log, day)

    def rule(self, model: KeywordModel) -> FirstPriceRule:
        return keyword_first_price_rule(model)

    def instance(self, model: KeywordModel, n_events: int, budgets, seed: int = 0) -> Instance:
        """Keyword instance of `n_events` draws from `model`, with one budget per advertiser."""
        return Instance(
            events=sample_event_stream(model, n_events, seed),
            campaigns=CampaignSet(budgets=budgets),
            bid_matrix=model.bids,
            seed=seed,
        )

    def day_shift(
        self,
        model_day1: KeywordModel,
        cfg: Optional[DayShiftConfig] = None,
        model_day2: Optional[KeywordModel] = None,
        budgets=None,
    ) -> DayShiftReport:
        return day_shift_experiment(
            model_day1, cfg, model_day2=model_day2, budgets=budgets, reducer=self._parent.reducer
        )

    def write_fixture(
        self,
        path: Union[str, Path],
        n_keywords: int = 1000,
        n_advertisers: int = 50,
        days: Sequence[int] = (1, 2),
        seed: int = 0,
    ) -> BidLogManifest:
        return generate_bid_log_fixture(
            path, n_keywords=n_keywords, n_advertisers=n_advertisers, days=days, seed=seed
        )

    def write_model(self, model: KeywordModel, path: Union[str, Path]):
        write_keyword_model(model, path)

    def read_model(self, path: Union[str, Path]) -> KeywordModel:
        return read_keyword_model(path)
