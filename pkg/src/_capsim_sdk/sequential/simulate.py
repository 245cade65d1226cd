import logging
from functools import reduce
from typing import List
from typing import Optional
from typing import Sequence

import numpy as np

from _capsim_sdk.core.reduce import ChunkReducer
from _capsim_sdk.core.reduce import fold
from _capsim_sdk.exceptions import DimensionMismatchError
from _capsim_sdk.exceptions import EmptySampleError
from _capsim_sdk.model.models import CampaignSet
from _capsim_sdk.model.models import EventStream
from _capsim_sdk.model.models import SpendCheckpoint
from _capsim_sdk.model.models import Trajectory
from _capsim_sdk.model.rules import AuctionRule
from _capsim_sdk.model.rules import ScaledRule
from _capsim_sdk.model.rules import validate_increments
from _capsim_sdk.sequential.models import SequentialConfig

logger = logging.getLogger("capsim.sequential")


def _check_dimensions(events: EventStream, campaigns: CampaignSet, rule: AuctionRule):
    if len(events) == 0:
        raise EmptySampleError("event stream")
    if rule.n_campaigns != campaigns.n_campaigns:
        raise DimensionMismatchError(
            "auction rule", campaigns.n_campaigns, rule.n_campaigns
        )


def _checkpoints_between(
    stride: int, start: int, cum: np.ndarray
) -> List[SpendCheckpoint]:
    if not stride:
        return []
    first = (start // stride + 1) * stride
    return [
        SpendCheckpoint(event_index=n, spends=cum[n - start - 1].copy())
        for n in range(first, start + cum.shape[0] + 1, stride)
    ]


def simulate_sequential(
    events: EventStream,
    campaigns: CampaignSet,
    rule: AuctionRule,
    cfg: Optional[SequentialConfig] = None,
    reducer: Optional[ChunkReducer] = None,
) -> Trajectory:
    """
    Exact event-by-event replay: s_n = s_{n-1} + f(e_n, a_{n-1}), where a campaign stays active while its spend is
    strictly below its budget. The increment that crosses a budget is paid in full.

    Events are evaluated in chunks under a constant activation. Within a chunk the running spend is accumulated row
    by row; the chunk is cut right after the first event at which an active campaign reaches its budget, and the
    next chunk starts there under the reduced activation. Capping detection uses the running spend. The reported
    final spends fold the chunk sums of every constant-activation segment in order, the same reduction the parallel
    aggregators use, so results agree bit for bit whenever the activation sequence agrees.

    **Parameters**:

    * **events**: `EventStream` - The full ordered event sequence.
    * **campaigns**: `CampaignSet` - Budgets.
    * **rule**: `AuctionRule` - Spend increments.
    * **cfg**: `SequentialConfig` - Checkpointing and contract validation.
    * **reducer**: `ChunkReducer` - Only its `chunk_size` matters here; the replay itself is single-threaded.

    **Returns**: A `Trajectory`.
    """
    cfg = cfg or SequentialConfig()
    reducer = reducer or ChunkReducer()
    _check_dimensions(events, campaigns, rule)

    N, K = len(events), campaigns.n_campaigns
    budgets = campaigns.budgets
    max_increment = rule.max_increment
    chunk = reducer.chunk_size

    active = np.ones(K, dtype=bool)
    running = np.zeros(K)
    total = np.zeros(K)
    segment_partials = []
    capping_times: List[Optional[int]] = [None] * K
    checkpoints = []

    pos = 0
    while pos < N and active.any():
        stop = min(pos + chunk, N)
        block = rule.spends(events, slice(pos, stop), active)
        if cfg.validate_contract:
            validate_increments(block, active, max_increment)

        cum = np.add.accumulate(np.vstack([running, block]), axis=0)[1:]
        crossed = (cum >= budgets) & active
        hits = np.flatnonzero(crossed.any(axis=1))
        cut = int(hits[0]) + 1 if hits.size else block.shape[0]

        checkpoints.extend(_checkpoints_between(cfg.checkpoint_stride, pos, cum[:cut]))
        segment_partials.append(block[:cut].sum(axis=0))
        running = cum[cut - 1].copy()
        pos += cut

        if hits.size:
            capped = np.flatnonzero(crossed[cut - 1])
            for c in capped:
                capping_times[c] = pos
            active[capped] = False
            total += fold(segment_partials, K)
            segment_partials = []
            logger.debug(
                f"Event {pos}: campaigns {[int(c) + 1 for c in capped]} capped, {int(active.sum())} still active."
            )

    total += fold(segment_partials, K)
    if pos < N and cfg.checkpoint_stride:
        # nobody is active any more, spends stay put
        checkpoints.extend(
            _checkpoints_between(
                cfg.checkpoint_stride, pos, np.tile(running, (N - pos, 1))
            )
        )

    trajectory = Trajectory(
        n_events=N,
        final_spends=total,
        capping_times=capping_times,
        spend_checkpoints=checkpoints,
    )
    logger.info(
        f"Sequential replay of {N} events: {trajectory.n_capped}/{K} campaigns capped."
    )
    return trajectory


def trivial_capped_sum(B: float, xs: Sequence[float]) -> float:
    """Single-budget replay S_{t+1} = min(S_t + x_t, B) from S_0 = 0, which is min(B, sum(xs)) for positive xs."""
    if B < 0:
        raise ValueError(f"B must be nonnegative, got {B}.")
    return reduce(lambda s, x: min(s + x, B), xs, 0.0)


def naive_sampled_sequential(
    events: EventStream,
    campaigns: CampaignSet,
    rule: AuctionRule,
    rho: float,
    seed: int,
    cfg: Optional[SequentialConfig] = None,
    reducer: Optional[ChunkReducer] = None,
) -> Trajectory:
    """
    Baseline: replay round(rho * N) events drawn without replacement (original order kept) with every increment
    multiplied by 1/rho. Capping times are reported as positions in the full stream.
    """
    if not 0 < rho <= 1:
        raise ValueError(f"rho must be in (0, 1], got {rho}.")
    _check_dimensions(events, campaigns, rule)
    N = len(events)
    k = int(round(rho * N))
    if k < 1:
        raise EmptySampleError(f"sample of rho={rho} over {N} events")

    if rho == 1:
        positions = np.arange(N)
        scaled = rule
    else:
        rng = np.random.default_rng(seed)
        positions = np.sort(rng.choice(N, size=k, replace=False))
        scaled = ScaledRule(rule, 1.0 / rho)

    sampled = simulate_sequential(
        events.take(positions), campaigns, scaled, cfg=cfg, reducer=reducer
    )
    to_source = positions + 1
    return Trajectory(
        n_events=N,
        final_spends=sampled.final_spends,
        capping_times=[
            None if t is None else int(to_source[t - 1]) for t in sampled.capping_times
        ],
        spend_checkpoints=[
            SpendCheckpoint(
                event_index=int(to_source[cp.event_index - 1]), spends=cp.spends
            )
            for cp in sampled.spend_checkpoints
        ],
    )
