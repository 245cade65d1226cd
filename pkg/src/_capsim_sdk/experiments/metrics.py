from typing import List
from typing import Optional

import numpy as np

from _capsim_sdk.bidlog.models import CurvePoint
from _capsim_sdk.exceptions import DimensionMismatchError
from _capsim_sdk.exceptions import EmptySampleError
from _capsim_sdk.experiments.models import TrajectoryComparison
from _capsim_sdk.model.models import Trajectory


def _pair(truth, predicted):
    truth = np.asarray(getattr(truth, "final_spends", truth), dtype=np.float64)
    predicted = np.asarray(getattr(predicted, "final_spends", predicted), dtype=np.float64)
    if truth.shape != predicted.shape:
        raise DimensionMismatchError("predicted spends", truth.shape[0], predicted.shape[0])
    return truth, predicted


def relative_errors(truth, predicted) -> np.ndarray:
    """|s - s_hat| / s per campaign, NaN where the true spend is zero."""
    truth, predicted = _pair(truth, predicted)
    out = np.full(truth.shape, np.nan)
    spent = truth > 0
    out[spent] = np.abs(predicted[spent] - truth[spent]) / truth[spent]
    return out


def weighted_error(truth, predicted) -> float:
    """
    Spend-weighted relative error: sum over campaigns of (s / sum(s)) * |s_hat - s| / s, which reduces to
    sum |s_hat - s| / sum s over the campaigns with positive true spend.

    Raises `EmptySampleError` when no campaign has positive true spend.
    """
    truth, predicted = _pair(truth, predicted)
    spent = truth > 0
    if not spent.any():
        raise EmptySampleError("set of campaigns with positive spend")
    return float(np.abs(predicted[spent] - truth[spent]).sum() / truth[spent].sum())


def cumulative_error_curve(truth, predicted) -> List[CurvePoint]:
    """
    Campaigns ranked by true spend, largest first, with the running share of total spend and the running
    spend-weighted error. The last point's error equals `weighted_error`.
    """
    truth, predicted = _pair(truth, predicted)
    spent = np.flatnonzero(truth > 0)
    if spent.size == 0:
        raise EmptySampleError("set of campaigns with positive spend")
    order = spent[np.argsort(-truth[spent], kind="stable")]
    total = truth[order].sum()
    shares = np.cumsum(truth[order]) / total
    errors = np.cumsum(np.abs(predicted[order] - truth[order])) / total
    return [
        CurvePoint(rank=r + 1, campaign=int(c) + 1, spend_share=float(s), cumulative_error=float(e))
        for r, (c, s, e) in enumerate(zip(order, shares, errors))
    ]


def compare_trajectories(truth: Trajectory, estimate: Trajectory) -> TrajectoryComparison:
    """
    Per-campaign relative error of `estimate`'s final spends against `truth`'s, with summary statistics and
    capping-time differences.

    Campaigns with zero true spend are left out of every relative statistic and counted in `n_excluded`.
    """
    if truth.n_campaigns != estimate.n_campaigns:
        raise DimensionMismatchError("estimate trajectory", truth.n_campaigns, estimate.n_campaigns)
    errors = relative_errors(truth, estimate)
    valid = errors[~np.isnan(errors)]

    def _stat(fn) -> Optional[float]:
        return float(fn(valid)) if valid.size else None

    deltas = [
        None if t is None or e is None else e - t
        for t, e in zip(truth.capping_times, estimate.capping_times)
    ]
    agreement = sum(
        (t is None) == (e is None) for t, e in zip(truth.capping_times, estimate.capping_times)
    )
    return TrajectoryComparison(
        relative_errors=[None if np.isnan(x) else float(x) for x in errors],
        max_error=_stat(np.max),
        median_error=_stat(np.median),
        mean_error=_stat(np.mean),
        weighted_error=weighted_error(truth, estimate) if valid.size else None,
        capping_time_deltas=deltas,
        capping_agreement=agreement / truth.n_campaigns,
        n_excluded=int(np.isnan(errors).sum()),
    )
