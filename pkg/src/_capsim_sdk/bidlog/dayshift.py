import logging
from typing import Optional

import numpy as np

from _capsim_sdk.bidlog.ingest import keyword_first_price_rule
from _capsim_sdk.bidlog.ingest import sample_event_stream
from _capsim_sdk.bidlog.models import DayShiftConfig
from _capsim_sdk.bidlog.models import DayShiftReport
from _capsim_sdk.bidlog.models import KeywordModel
from _capsim_sdk.bidlog.models import MethodScore
from _capsim_sdk.core.reduce import ChunkReducer
from _capsim_sdk.enums import DayShiftMethod
from _capsim_sdk.exceptions import DimensionMismatchError
from _capsim_sdk.experiments.metrics import cumulative_error_curve
from _capsim_sdk.experiments.metrics import relative_errors
from _capsim_sdk.experiments.metrics import weighted_error
from _capsim_sdk.model.models import CampaignSet
from _capsim_sdk.model.models import EventStream
from _capsim_sdk.model.rules import AuctionRule
from _capsim_sdk.sequential.simulate import simulate_sequential
from _capsim_sdk.sort2aggregate.aggregate import sort2aggregate
from _capsim_sdk.synthetic.generate import calibrate_base_budget
from _capsim_sdk.synthetic.generate import uniform_budgets

logger = logging.getLogger("capsim.bidlog")


def _score(method: DayShiftMethod, truth: np.ndarray, predicted: np.ndarray) -> MethodScore:
    errors = relative_errors(truth, predicted)
    return MethodScore(
        method=method,
        predicted_spends=predicted,
        weighted_error=weighted_error(truth, predicted),
        relative_errors=[None if np.isnan(e) else float(e) for e in errors],
        curve=cumulative_error_curve(truth, predicted),
    )


def day_shift_experiment(
    model_day1: KeywordModel,
    cfg: Optional[DayShiftConfig] = None,
    model_day2: Optional[KeywordModel] = None,
    budgets=None,
    reducer: Optional[ChunkReducer] = None,
) -> DayShiftReport:
    """
    Predict day-2 advertiser spends after the auction volume changes from `cfg.n1` to `cfg.n2`, with budgets held.

    Day 1 is replayed exactly on `n1` events drawn from `model_day1`. Day 2 draws `n2` events from `model_day2`
    (`model_day1` when unset) and is predicted three ways:

    * **as-is**: day-1 final spends.
    * **rescaled**: day-1 final spends times n2 / n1, clamped at the budgets.
    * **s2a**: sort2aggregate on the day-2 events, warm-started from the day-1 capping fractions.

    Each prediction is scored against the day-2 sequential replay with the spend-weighted relative error.

    Without `budgets` or `cfg.budget` every advertiser gets the same budget, calibrated on the day-1 replay so that a
    fraction `cfg.target_capped_fraction` of the advertisers caps.
    """
    cfg = cfg or DayShiftConfig()
    reducer = reducer or ChunkReducer()
    model_day2 = model_day2 or model_day1
    K = model_day1.n_advertisers
    if model_day2.n_advertisers != K:
        raise DimensionMismatchError("day-2 keyword model", K, model_day2.n_advertisers)

    rule1 = keyword_first_price_rule(model_day1)
    rule2 = rule1 if model_day2 is model_day1 else keyword_first_price_rule(model_day2)
    events1 = sample_event_stream(model_day1, cfg.n1, cfg.seed)
    events2 = sample_event_stream(model_day2, cfg.n2, cfg.resolved_day2_seed)

    if budgets is not None:
        budgets = np.asarray(budgets, dtype=np.float64)
        if budgets.shape != (K,):
            raise DimensionMismatchError("budgets", K, budgets.reshape(-1).shape[0])
    elif cfg.budget is not None:
        budgets = np.full(K, cfg.budget)
    else:
        calibration = calibrate_base_budget(
            events1,
            rule1,
            target_fraction=cfg.target_capped_fraction,
            tolerance=cfg.calibration_tolerance,
            reducer=reducer,
            budgets_for=uniform_budgets,
        )
        budgets = uniform_budgets(K, calibration.b_base)
        logger.info(
            f"Calibrated day-1 budget {calibration.b_base:.6g} caps {calibration.capped_fraction:.0%} of advertisers."
        )
    campaigns = CampaignSet(budgets=budgets)

    day1 = simulate_sequential(events1, campaigns, rule1, reducer=reducer)
    day2 = simulate_sequential(events2, campaigns, rule2, reducer=reducer)
    truth = day2.final_spends

    pi_init = day1.capping_fractions()
    s2a = sort2aggregate(
        events2,
        campaigns,
        rule2,
        cfg.estimator.warm_started(pi_init),
        refine=cfg.refine,
        reducer=reducer,
    )

    predictions = {
        DayShiftMethod.AS_IS: day1.final_spends,
        DayShiftMethod.RESCALED: np.minimum(day1.final_spends * cfg.n2 / cfg.n1, budgets),
        DayShiftMethod.S2A: s2a.trajectory.final_spends,
    }
    scores = [_score(method, truth, predicted) for method, predicted in predictions.items()]
    for score in scores:
        logger.info(f"Day-shift {score.method}: weighted error {score.weighted_error:.4f}.")

    return DayShiftReport(
        n1=cfg.n1,
        n2=cfg.n2,
        budgets=budgets,
        day1_spends=day1.final_spends,
        day2_spends=truth,
        day1_capped=day1.n_capped,
        day2_capped=day2.n_capped,
        pi_init=pi_init,
        scores=scores,
        n_excluded=int(np.sum(truth <= 0)),
        s2a_consistent=s2a.consistent,
    )
