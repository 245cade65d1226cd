import logging
from typing import Callable
from typing import List
from typing import Optional
from typing import Tuple

import numpy as np

from _capsim_sdk.core.reduce import ChunkReducer
from _capsim_sdk.enums import InitMode
from _capsim_sdk.enums import StepSchedule
from _capsim_sdk.estimator.models import ConvergenceTrace
from _capsim_sdk.estimator.models import EstimatorConfig
from _capsim_sdk.estimator.models import PiVector
from _capsim_sdk.exceptions import DimensionMismatchError
from _capsim_sdk.exceptions import EmptySampleError
from _capsim_sdk.model.models import CampaignSet
from _capsim_sdk.model.models import CappingEvent
from _capsim_sdk.model.models import EventStream
from _capsim_sdk.model.rules import AuctionRule

logger = logging.getLogger("capsim.estimator")

# sweeps in a row below tolerance before stopping early
_PATIENCE = 3


def complementarity_violation(pi, G) -> float:
    """
    Largest violation over campaigns of 0 <= 1 - pi_c, G_c <= 0 and (1 - pi_c) * G_c = 0.
    """
    pi = np.asarray(getattr(pi, "pi", pi), dtype=np.float64)
    G = np.asarray(G, dtype=np.float64)
    if pi.shape != G.shape:
        raise DimensionMismatchError("residual", pi.shape[0], G.shape[0])
    slack = 1.0 - pi
    per_campaign = np.maximum.reduce(
        [slack * np.abs(G), np.maximum(G, 0.0), np.maximum(-slack, 0.0)]
    )
    return float(per_campaign.max(initial=0.0))


def _sample_size(rho: float, N: int) -> int:
    k = int(round(rho * N))
    if k < 1:
        raise ValueError(f"rho={rho} samples no event out of N={N}.")
    return k


def estimate_pi(
    events: EventStream,
    campaigns: CampaignSet,
    rule: AuctionRule,
    cfg: Optional[EstimatorConfig] = None,
    on_step: Optional[Callable[[np.ndarray], None]] = None,
) -> Tuple[PiVector, ConvergenceTrace]:
    """
    Stochastic projected fixed-point iteration for the scaled capping times.

    Draws k = round(rho * N) events once, then sweeps them `T` times. Each update draws an independent uniform u per
    campaign (per event), activates campaign c iff u_c < pi_c, evaluates the rule and moves
    pi <- clip(pi + eta * (b / N - s), 0, 1), with s averaged over the batch.

    **Parameters**:

    * **on_step**: `Callable` - Receives a read-only view of pi after every update.

    **Returns**: The estimated `PiVector` and its `ConvergenceTrace`.
    """
    cfg = cfg or EstimatorConfig()
    N, K = len(events), campaigns.n_campaigns
    if N == 0:
        raise EmptySampleError("event stream")
    if rule.n_campaigns != K:
        raise DimensionMismatchError("auction rule", K, rule.n_campaigns)
    k = _sample_size(cfg.rho, N)

    rng = np.random.default_rng(cfg.seed)
    sample = rng.choice(N, size=k, replace=False)
    b_tilde = campaigns.budgets / N

    if cfg.init == InitMode.WARM_START:
        pi = np.array(cfg.warm_start, dtype=np.float64)
        if pi.shape[0] != K:
            raise DimensionMismatchError("warm_start", K, pi.shape[0])
    else:
        pi = np.ones(K)

    snapshots, residuals, violations, deltas = [], [], [], []
    below = 0
    for sweep in range(1, cfg.T + 1):
        eta = cfg.eta
        if cfg.step_schedule == StepSchedule.INVERSE_SQRT:
            eta = cfg.eta / np.sqrt(sweep)
        sweep_spend = np.zeros(K)
        abs_delta = 0.0
        n_updates = 0
        for start in range(0, k, cfg.batch):
            rows = sample[start : start + cfg.batch]
            active = rng.random((rows.shape[0], K)) < pi
            s = rule.spends(events, rows, active)
            sweep_spend += s.sum(axis=0)
            delta = b_tilde - s.mean(axis=0)
            np.clip(pi + eta * delta, 0.0, 1.0, out=pi)
            abs_delta += float(np.abs(delta).mean())
            n_updates += 1
            if on_step is not None:
                view = pi.view()
                view.setflags(write=False)
                on_step(view)

        residual = sweep_spend / k - b_tilde
        violation = complementarity_violation(pi, residual)
        snapshots.append(pi.copy())
        residuals.append(residual)
        violations.append(violation)
        deltas.append(abs_delta / n_updates)
        logger.debug(f"Sweep {sweep}: complementarity violation {violation:.3e}.")

        if cfg.tolerance is not None:
            below = below + 1 if violation < cfg.tolerance else 0
            if below >= _PATIENCE:
                logger.info(f"Stopping after sweep {sweep}: tolerance reached.")
                break

    if cfg.tail_average:
        pi = np.mean(snapshots[-cfg.tail_average :], axis=0)

    trace = ConvergenceTrace(
        pi=np.array(snapshots),
        residual=np.array(residuals),
        complementarity=np.array(violations),
        mean_abs_delta=np.array(deltas),
    )
    logger.info(
        f"Estimated pi over {k} sampled events and {trace.n_sweeps} sweeps: "
        f"{int((pi < 1 - cfg.survival_tolerance).sum())}/{K} campaigns predicted to cap."
    )
    return PiVector(pi=np.clip(pi, 0.0, 1.0)), trace


def vi_residual(
    pi,
    events: EventStream,
    campaigns: CampaignSet,
    rule: AuctionRule,
    mc_draws: int,
    seed: int,
    positions=None,
    per_event: bool = False,
    reducer: Optional[ChunkReducer] = None,
) -> np.ndarray:
    """
    Monte-Carlo estimate of G(pi) = F(pi) - b, where F(pi) is N times the expected per-event spend when each
    campaign is independently active with probability pi_c.

    The expectation runs over the events at `positions` (all events by default) and `mc_draws` activation draws.
    Every (draw, chunk) pair gets its own seed, so the value depends on `seed` and the reducer's chunk size but not on
    its worker count. With `per_event=True` returns G / N, the residual on the per-event budget scale b / N.
    """
    if mc_draws < 1:
        raise ValueError(f"mc_draws must be >= 1, got {mc_draws}.")
    pi = np.asarray(getattr(pi, "pi", pi), dtype=np.float64)
    N, K = len(events), campaigns.n_campaigns
    if pi.shape[0] != K:
        raise DimensionMismatchError("pi", K, pi.shape[0])
    rows = np.arange(N) if positions is None else np.asarray(positions, dtype=np.int64)
    n = rows.shape[0]
    if n == 0:
        raise EmptySampleError()
    reducer = reducer or ChunkReducer()
    n_chunks = len(reducer.ranges(0, n))

    total = np.zeros(K)
    for draw in np.random.SeedSequence(seed).spawn(mc_draws):
        chunk_seeds = draw.spawn(n_chunks)

        def _evaluate(start, stop, chunk_seeds=chunk_seeds):
            gen = np.random.Generator(
                np.random.PCG64(chunk_seeds[start // reducer.chunk_size])
            )
            active = gen.random((stop - start, K)) < pi
            return rule.spends(events, rows[start:stop], active)

        total += reducer.reduce(_evaluate, 0, n, K)

    mean = total / (mc_draws * n)
    if per_event:
        return mean - campaigns.budgets / N
    return N * mean - campaigns.budgets


def pi_to_capping_schedule(pi, N: int, survival_tolerance: float = 0.0) -> List[CappingEvent]:
    """
    Estimated capping times N^c = round(pi_c * N), at least 1, for every campaign with pi_c < 1 - survival_tolerance,
    sorted by time then campaign.

    Constant-step iterates of a campaign that never caps keep dipping just below 1; a small `survival_tolerance`
    keeps those campaigns out of the schedule.
    """
    if not 0 <= survival_tolerance < 1:
        raise ValueError(f"survival_tolerance must be in [0, 1), got {survival_tolerance}.")
    pi = np.asarray(getattr(pi, "pi", pi), dtype=np.float64)
    cutoff = 1.0 - survival_tolerance
    schedule = [
        (max(1, int(np.rint(p * N))), c + 1) for c, p in enumerate(pi) if p < cutoff
    ]
    return [CappingEvent(campaign=c, time=t) for t, c in sorted(schedule)]
