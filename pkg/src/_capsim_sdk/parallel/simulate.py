import logging
from typing import List
from typing import Optional
from typing import Tuple

import numpy as np

from _capsim_sdk.core.reduce import ChunkReducer
from _capsim_sdk.core.reduce import fold
from _capsim_sdk.enums import RateBasis
from _capsim_sdk.exceptions import DimensionMismatchError
from _capsim_sdk.exceptions import EmptySampleError
from _capsim_sdk.model.models import ActivationVector
from _capsim_sdk.model.models import CampaignSet
from _capsim_sdk.model.models import EventStream
from _capsim_sdk.model.models import SpendCheckpoint
from _capsim_sdk.model.models import Trajectory
from _capsim_sdk.model.rules import AuctionRule
from _capsim_sdk.parallel.models import ParallelSimReport
from _capsim_sdk.parallel.models import RateBasisConfig
from _capsim_sdk.parallel.models import RateEstimate
from _capsim_sdk.parallel.models import SimulatedSegment

logger = logging.getLogger("capsim.parallel")

_SNAP_TOLERANCE = 1e-9


def _block_fn(rule: AuctionRule, events: EventStream, active: np.ndarray):
    def _evaluate(start, stop):
        return rule.spends(events, slice(start, stop), active)

    return _evaluate


def _estimate(
    events: EventStream,
    pos: int,
    active: np.ndarray,
    rule: AuctionRule,
    basis: RateBasisConfig,
    reducer: ChunkReducer,
    rng: np.random.Generator,
) -> Tuple[RateEstimate, Optional[np.ndarray]]:
    """Returns the rate estimate, plus the chunk sums over [pos, N) when the exact remaining mean was used."""
    N, K = len(events), active.shape[0]
    if pos >= N:
        raise EmptySampleError("remaining event range")

    kind = RateBasis(basis.kind)
    if kind == RateBasis.SUBSAMPLED and basis.rate >= 1:
        kind = RateBasis.EXACT_REMAINING
    if kind == RateBasis.CONSUMED_PREFIX and pos == 0:
        kind = RateBasis.EXACT_REMAINING

    partials = None
    if kind == RateBasis.EXACT_REMAINING:
        partials = reducer.chunk_sums(_block_fn(rule, events, active), pos, N, K)
        n = N - pos
        F = fold(partials, K) / n
    elif kind == RateBasis.SUBSAMPLED:
        n = max(1, int(round(basis.rate * (N - pos))))
        rows = pos + np.sort(rng.choice(N - pos, size=n, replace=False))
        F = (
            reducer.reduce(
                lambda a, b: rule.spends(events, rows[a:b], active), 0, n, K
            )
            / n
        )
    else:
        n = pos
        F = reducer.reduce(_block_fn(rule, events, active), 0, pos, K) / n

    F[~active] = 0.0
    return RateEstimate(F=F, basis=kind, n_sampled=n), partials


def estimate_mean_rate(
    events: EventStream,
    from_index: int,
    activation,
    rule: AuctionRule,
    basis: Optional[RateBasisConfig] = None,
    reducer: Optional[ChunkReducer] = None,
) -> RateEstimate:
    """
    Expected per-event spend under a fixed activation, estimated from the events after the first `from_index`.

    Under the exact remaining mean this is the mean of f(e, activation) over every unconsumed event, the exact
    conditional expectation when the sequence is a uniformly random order of the event set.
    """
    basis = basis or RateBasisConfig()
    if isinstance(activation, ActivationVector):
        activation = activation.bits
    active = np.array(activation, dtype=bool)
    estimate, _ = _estimate(
        events,
        from_index,
        active,
        rule,
        basis,
        reducer or ChunkReducer(),
        np.random.default_rng(basis.seed),
    )
    return estimate


def _snap_floor(x: float) -> int:
    nearest = np.rint(x)
    if abs(x - nearest) <= _SNAP_TOLERANCE * max(1.0, abs(x)):
        return int(nearest)
    return int(np.floor(x))


def _segment_sum(
    events: EventStream,
    rule: AuctionRule,
    active: np.ndarray,
    pos: int,
    end: int,
    partials: Optional[np.ndarray],
    reducer: ChunkReducer,
) -> np.ndarray:
    K = active.shape[0]
    if partials is None:
        return reducer.reduce(_block_fn(rule, events, active), pos, end, K)
    n_full, remainder = divmod(end - pos, reducer.chunk_size)
    parts = list(partials[:n_full])
    if remainder:
        chunk_start = pos + n_full * reducer.chunk_size
        parts.append(rule.spends(events, slice(chunk_start, end), active).sum(axis=0))
    return fold(parts, K)


def parallel_simulate(
    events: EventStream,
    campaigns: CampaignSet,
    rule: AuctionRule,
    basis: Optional[RateBasisConfig] = None,
    reducer: Optional[ChunkReducer] = None,
) -> ParallelSimReport:
    """
    Segment-wise replay that predicts each next capping campaign from expected spend rates.

    Each iteration estimates F under the current activation, picks the active campaign with F > 0 whose remaining
    budget runs out first (ties to the lowest index), advances by the floor of its remaining budget over its rate
    (at least one event, at most to N) and sums the segment's spends under the frozen activation. The capper is
    then deactivated. When no active campaign spends anything, the run finishes at N.

    **Returns**: A `ParallelSimReport` with the estimated trajectory and one entry per segment.
    """
    basis = basis or RateBasisConfig()
    reducer = reducer or ChunkReducer()
    if len(events) == 0:
        raise EmptySampleError("event stream")
    if rule.n_campaigns != campaigns.n_campaigns:
        raise DimensionMismatchError(
            "auction rule", campaigns.n_campaigns, rule.n_campaigns
        )

    N, K = len(events), campaigns.n_campaigns
    budgets = campaigns.budgets
    rng = np.random.default_rng(basis.seed)
    evaluations_before = rule.evaluations

    active = np.ones(K, dtype=bool)
    s_hat = np.zeros(K)
    capping_times: List[Optional[int]] = [None] * K
    segments = []
    checkpoints = []

    pos = 0
    while pos < N and active.any():
        estimate, partials = _estimate(events, pos, active, rule, basis, reducer, rng)
        F = estimate.F
        candidates = active & (F > 0)
        if candidates.any():
            ratio = np.full(K, np.inf)
            ratio[candidates] = (budgets[candidates] - s_hat[candidates]) / F[candidates]
            capper = int(np.argmin(ratio))
            end = min(pos + max(1, _snap_floor(ratio[capper])), N)
        else:
            capper = None
            end = N

        segment_spend = _segment_sum(events, rule, active, pos, end, partials, reducer)
        s_hat += segment_spend
        segment = SimulatedSegment(
            start=pos + 1,
            end=end,
            activation=active.copy(),
            capper=None if capper is None else capper + 1,
            spend=segment_spend,
        )
        segments.append(segment)
        checkpoints.append(SpendCheckpoint(event_index=end, spends=s_hat.copy()))
        logger.debug(
            f"Segment [{segment.start}..{end}] with {int(active.sum())} active, predicted capper {segment.capper}."
        )

        if capper is not None:
            if end < N or s_hat[capper] >= budgets[capper]:
                capping_times[capper] = end
            active[capper] = False
        pos = end

    trajectory = Trajectory(
        n_events=N,
        final_spends=s_hat,
        capping_times=capping_times,
        spend_checkpoints=checkpoints,
    )
    logger.info(
        f"Parallel simulation of {N} events: {len(segments)} segments, {trajectory.n_capped}/{K} campaigns capped."
    )
    return ParallelSimReport(
        trajectory=trajectory,
        segments=segments,
        basis=basis,
        evaluations=rule.evaluations - evaluations_before,
    )
