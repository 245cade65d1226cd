import logging
from typing import List
from typing import Optional
from typing import Sequence
from typing import Tuple
from typing import Union

import numpy as np

from _capsim_sdk.core.reduce import ChunkReducer
from _capsim_sdk.core.reduce import fold
from _capsim_sdk.enums import BoundaryIssue
from _capsim_sdk.estimator.estimate import estimate_pi
from _capsim_sdk.estimator.estimate import pi_to_capping_schedule
from _capsim_sdk.estimator.models import EstimatorConfig
from _capsim_sdk.exceptions import DimensionMismatchError
from _capsim_sdk.model.models import CampaignSet
from _capsim_sdk.model.models import CappingEvent
from _capsim_sdk.model.models import EventStream
from _capsim_sdk.model.models import Trajectory
from _capsim_sdk.model.rules import AuctionRule
from _capsim_sdk.sort2aggregate.models import AggregateReport
from _capsim_sdk.sort2aggregate.models import BoundaryFlag
from _capsim_sdk.sort2aggregate.models import ConsistencyCheck
from _capsim_sdk.sort2aggregate.models import CostEstimate
from _capsim_sdk.sort2aggregate.models import EvaluationCount
from _capsim_sdk.sort2aggregate.models import PlanSegment
from _capsim_sdk.sort2aggregate.models import SegmentPlan

logger = logging.getLogger("capsim.sort2aggregate")

ScheduleEntry = Union[CappingEvent, Tuple[int, int]]


def _as_pair(entry: ScheduleEntry) -> Tuple[int, int]:
    if isinstance(entry, CappingEvent):
        return entry.campaign, entry.time
    campaign, time = entry
    return int(campaign), int(time)


def _segments(boundaries: Sequence[CappingEvent], K: int, N: int) -> List[PlanSegment]:
    active = np.ones(K, dtype=bool)
    segments = []
    start = 1
    for b in boundaries:
        segments.append(
            PlanSegment(start=start, end=b.time, activation=active.copy(), capper=b.campaign)
        )
        active[b.campaign - 1] = False
        start = b.time + 1
    if start <= N:
        segments.append(PlanSegment(start=start, end=N, activation=active.copy()))
    return segments


def build_segment_plan(schedule: Sequence[ScheduleEntry], K: int, N: int) -> SegmentPlan:
    """
    Turns an ordered capping schedule into constant-activation segments.

    Entries are ordered by (time, campaign). A time that does not exceed the previous boundary is moved to the
    previous boundary + 1; entries pushed past N are dropped with a warning.
    """
    pairs = [_as_pair(e) for e in schedule]
    seen = set()
    for campaign, time in pairs:
        if campaign in seen:
            raise ValueError(f"Campaign {campaign} appears twice in the capping schedule.")
        if not 1 <= campaign <= K:
            raise ValueError(f"Campaign index {campaign} out of range [1..{K}].")
        if not 1 <= time <= N:
            raise ValueError(
                f"Capping time {time} of campaign {campaign} outside [1..{N}]."
            )
        seen.add(campaign)

    boundaries = []
    previous = 0
    for campaign, time in sorted(pairs, key=lambda p: (p[1], p[0])):
        time = max(time, previous + 1)
        if time > N:
            logger.warning(
                f"Dropping campaign {campaign} from the plan: no event left after boundary {previous}."
            )
            continue
        boundaries.append(CappingEvent(campaign=campaign, time=time))
        previous = time
    return SegmentPlan(
        n_events=N,
        n_campaigns=K,
        boundaries=boundaries,
        segments=_segments(boundaries, K, N),
    )


def _block_fn(rule: AuctionRule, events: EventStream, active: np.ndarray):
    def _evaluate(start, stop):
        return rule.spends(events, slice(start, stop), active)

    return _evaluate


def aggregate_segments(
    events: EventStream,
    plan: SegmentPlan,
    rule: AuctionRule,
    reducer: Optional[ChunkReducer] = None,
) -> np.ndarray:
    """
    Spend sums of every plan segment under its frozen activation, as an (n_segments, K) array. Sums cached by
    `refine_boundaries` are reused as they are.
    """
    reducer = reducer or ChunkReducer()
    if len(events) != plan.n_events:
        raise DimensionMismatchError("event stream", plan.n_events, len(events))
    K = plan.n_campaigns
    cached = plan.cached_sums or [None] * len(plan.segments)
    sums = []
    for segment, known in zip(plan.segments, cached):
        if known is None:
            known = reducer.reduce(
                _block_fn(rule, events, segment.activation),
                segment.start - 1,
                segment.end,
                K,
            )
        sums.append(known)
    return np.array(sums).reshape(len(plan.segments), K)


def _next_crossing(
    events: EventStream,
    rule: AuctionRule,
    active: np.ndarray,
    spend: np.ndarray,
    budgets: np.ndarray,
    pos: int,
    first_stop: int,
    step: int,
    reducer: ChunkReducer,
) -> Tuple[Optional[int], np.ndarray, np.ndarray]:
    """
    Scans rows from `pos` for the first event at which an active campaign reaches its budget.

    Rows are summed chunk by chunk in windows, the first ending at `first_stop` and every later one `step` rows
    further, each rounded up to whole chunks so that chunks stay aligned at `pos`. Only the chunk holding the
    crossing is evaluated row by row.

    Returns the 1-based crossing event (or `None` when no budget is reached before N), the 0-based campaigns crossing
    there, and the segment sum from `pos` up to that event (or up to N).
    """
    N, K = len(events), active.shape[0]
    chunk = reducer.chunk_size
    evaluate = _block_fn(rule, events, active)
    partials = []
    running = spend.copy()
    start, stop = pos, first_stop
    while start < N:
        stop = max(stop, start + 1)
        stop = min(N, start + -(-(stop - start) // chunk) * chunk)
        window = reducer.chunk_sums(evaluate, start, stop, K)
        for j, (lo, up) in enumerate(reducer.ranges(start, stop)):
            if np.any((running + window[j] >= budgets) & active):
                block = rule.spends(events, slice(lo, up), active)
                cum = np.add.accumulate(np.vstack([running, block]), axis=0)[1:]
                hits = (cum >= budgets) & active
                rows = np.flatnonzero(hits.any(axis=1))
                if rows.size:
                    r = int(rows[0])
                    return (
                        lo + r + 1,
                        np.flatnonzero(hits[r]),
                        fold(partials + [block[: r + 1].sum(axis=0)], K),
                    )
            running = running + window[j]
            partials.append(window[j])
        start, stop = stop, stop + step
    return None, np.zeros(0, dtype=np.int64), fold(partials, K)


def refine_boundaries(
    events: EventStream,
    campaigns: CampaignSet,
    rule: AuctionRule,
    plan: SegmentPlan,
    window_fraction: float = 0.05,
    reducer: Optional[ChunkReducer] = None,
) -> SegmentPlan:
    """
    Replaces the estimated boundaries with the events at which budgets are actually reached.

    Boundaries are swept left to right. From the last placed boundary the events are scanned under the current
    activation for the first event at which any active campaign reaches its budget, and that campaign is deactivated
    there. The scan runs in windows of w = round(window_fraction * N) events (at least one chunk); the first window
    ends w events after the next scheduled boundary, shifted by the correction applied to the previous one. Chunks
    are summed first and only the chunk holding the crossing is evaluated row by row.

    Departures from the schedule are flagged:

    * a scheduled campaign crossing ahead of the next scheduled capper is `out-of-order`;
    * a campaign missing from the schedule that crosses is `unscheduled`;
    * a scheduled campaign whose budget is not reached before N is `not-reached` and stays active;
    * when several campaigns cross at the same event, the first in schedule order takes the boundary and the others
        are placed on the following events as `already-exhausted`.

    Segment sums found along the way are cached on the returned plan.
    """
    reducer = reducer or ChunkReducer()
    if not 0 <= window_fraction <= 1:
        raise ValueError(f"window_fraction must be in [0, 1], got {window_fraction}.")
    N, K = plan.n_events, plan.n_campaigns
    if campaigns.n_campaigns != K:
        raise DimensionMismatchError("campaign set", K, campaigns.n_campaigns)
    budgets = campaigns.budgets
    w = int(round(window_fraction * N))
    step = max(w, reducer.chunk_size)

    scheduled = [b.campaign - 1 for b in plan.boundaries]
    estimates = {b.campaign - 1: b.time for b in plan.boundaries}
    rank = {c: i for i, c in enumerate(scheduled)}

    def _by_schedule(cs):
        return sorted((int(c) for c in cs), key=lambda c: (rank.get(c, len(rank)), c))

    active = np.ones(K, dtype=bool)
    spend = np.zeros(K)
    pos = 0
    shift = 0
    tail = None
    boundaries, sums, flags = [], [], []

    def _flag(c, time, issue):
        flags.append(
            BoundaryFlag(
                campaign=c + 1,
                time=time,
                issue=issue,
                spend=float(spend[c]),
                budget=float(budgets[c]),
            )
        )
        logger.warning(f"Boundary of campaign {c + 1} at event {time} is {issue.value}.")

    while pos < N and active.any():
        upcoming = next((c for c in scheduled if active[c]), None)
        exhausted = _by_schedule(np.flatnonzero(active & (spend >= budgets)))
        if exhausted:
            c, time = exhausted[0], pos + 1
            segment = reducer.reduce(_block_fn(rule, events, active), pos, time, K)
            issue = BoundaryIssue.ALREADY_EXHAUSTED
        else:
            target = estimates[upcoming] + shift if upcoming is not None else N
            time, crossed, segment = _next_crossing(
                events, rule, active, spend, budgets, pos, target + w, step, reducer
            )
            if time is None:
                tail = segment
                spend += segment
                break
            c = _by_schedule(crossed)[0]
            issue = None
            if c not in rank:
                issue = BoundaryIssue.UNSCHEDULED
            elif c != upcoming:
                issue = BoundaryIssue.OUT_OF_ORDER

        spend += segment
        if c in rank:
            shift = time - estimates[c]
            logger.debug(f"Campaign {c + 1}: boundary {estimates[c]} -> {time}.")
        if issue is not None:
            _flag(c, time, issue)
        boundaries.append(CappingEvent(campaign=c + 1, time=time))
        sums.append(segment)
        active[c] = False
        pos = time

    for c in scheduled:
        if active[c]:
            _flag(c, N, BoundaryIssue.NOT_REACHED)

    segments = _segments(boundaries, K, N)
    if tail is not None:
        sums.append(tail)
    sums.extend([None] * (len(segments) - len(sums)))
    return SegmentPlan(
        n_events=N,
        n_campaigns=K,
        boundaries=boundaries,
        segments=segments,
        flags=flags,
        cached_sums=sums,
    )


def _consistency_checks(
    plan: SegmentPlan,
    segment_sums: np.ndarray,
    budgets: np.ndarray,
    tolerance: float,
    max_increment: float,
) -> List[ConsistencyCheck]:
    checks = []
    spend = np.zeros(plan.n_campaigns)
    for segment, segment_sum in zip(plan.segments, segment_sums):
        spend += segment_sum
        if segment.capper is None:
            continue
        c = segment.capper - 1
        lower, upper = budgets[c] - tolerance, budgets[c] + max_increment
        value = float(spend[c])
        checks.append(
            ConsistencyCheck(
                campaign=segment.capper,
                time=segment.end,
                spend=value,
                budget=float(budgets[c]),
                lower=lower,
                upper=upper,
                passed=lower <= value <= upper,
                discrepancy=max(lower - value, value - upper, 0.0),
            )
        )

    deactivated = {b.campaign for b in plan.boundaries}
    for c in range(plan.n_campaigns):
        if c + 1 in deactivated:
            continue
        upper = budgets[c] + max_increment
        value = float(spend[c])
        if value > upper:
            checks.append(
                ConsistencyCheck(
                    campaign=c + 1,
                    time=None,
                    spend=value,
                    budget=float(budgets[c]),
                    lower=0.0,
                    upper=upper,
                    passed=False,
                    discrepancy=value - upper,
                )
            )
    return checks


def sort2aggregate(
    events: EventStream,
    campaigns: CampaignSet,
    rule: AuctionRule,
    cfg: Optional[EstimatorConfig] = None,
    refine: bool = True,
    window_fraction: float = 0.05,
    tolerance: Optional[float] = None,
    reducer: Optional[ChunkReducer] = None,
) -> AggregateReport:
    """
    Estimate capping times, optionally refine them against the events, then aggregate spends segment by segment.

    Every capper's reconstructed spend at its boundary is checked against [b - tau, b + C/N], and every campaign the
    plan keeps active against b + C/N. `tau` defaults to C/N + eta * N * (largest per-event segment spend rate). A
    failed check is reported, not raised.

    **Returns**: An `AggregateReport`.
    """
    cfg = cfg or EstimatorConfig()
    reducer = reducer or ChunkReducer()
    N, K = len(events), campaigns.n_campaigns
    budgets = campaigns.budgets

    before = rule.evaluations
    pi, trace = estimate_pi(events, campaigns, rule, cfg)
    estimated = rule.evaluations

    plan = build_segment_plan(pi_to_capping_schedule(pi, N, cfg.survival_tolerance), K, N)
    if refine:
        plan = refine_boundaries(
            events, campaigns, rule, plan, window_fraction=window_fraction, reducer=reducer
        )
    refined = rule.evaluations

    segment_sums = aggregate_segments(events, plan, rule, reducer=reducer)
    aggregated = rule.evaluations

    lengths = np.array([s.length for s in plan.segments], dtype=np.float64)
    max_rate = float((segment_sums / lengths[:, None]).max(initial=0.0))
    max_increment = rule.max_increment
    tau = tolerance if tolerance is not None else max_increment + cfg.eta * N * max_rate
    checks = _consistency_checks(plan, segment_sums, budgets, tau, max_increment)
    for failed in (c for c in checks if not c.passed):
        logger.warning(
            f"Consistency check failed for campaign {failed.campaign}: spend {failed.spend:.6g} "
            f"outside [{failed.lower:.6g}, {failed.upper:.6g}]."
        )

    capping_times: List[Optional[int]] = [None] * K
    for b in plan.boundaries:
        capping_times[b.campaign - 1] = b.time
    trajectory = Trajectory(
        n_events=N,
        final_spends=fold(segment_sums, K),
        capping_times=capping_times,
    )
    evaluations = EvaluationCount(
        estimation=estimated - before,
        refinement=refined - estimated,
        aggregation=aggregated - refined,
    )
    logger.info(
        f"sort2aggregate over {N} events: {len(plan.segments)} segments, "
        f"{len(checks) - len([c for c in checks if not c.passed])}/{len(checks)} checks passed, "
        f"{evaluations.total} evaluations."
    )
    return AggregateReport(
        trajectory=trajectory,
        pi=pi,
        trace=trace,
        plan=plan,
        segment_sums=segment_sums,
        checks=checks,
        tolerance=tau,
        evaluations=evaluations,
    )


def cost_model(N: int, A: float, T: int, rho: float, n_cores: int) -> CostEstimate:
    """
    Wall-clock model of the pipeline with auctions costing `A` seconds each: estimation N*A*T*rho/n_cores,
    aggregation N*A/n_cores, against N*A for the sequential replay.
    """
    for name, value in (("N", N), ("A", A), ("T", T), ("rho", rho), ("n_cores", n_cores)):
        if value <= 0:
            raise ValueError(f"{name} must be positive, got {value}.")
    return CostEstimate(
        estimation_seconds=N * A * T * rho / n_cores,
        aggregation_seconds=N * A / n_cores,
        sequential_seconds=N * A,
        estimation_evaluations=T * int(round(rho * N)),
        aggregation_evaluations=N,
    )
