import logging
from typing import Iterable
from typing import Optional

import numpy as np
from pydantic import Field

from _capsim_sdk.core.models import Model
from _capsim_sdk.core.reduce import ChunkReducer
from _capsim_sdk.exceptions import EmptySampleError
from _capsim_sdk.model.models import AssumptionParams
from _capsim_sdk.model.models import EventStream
from _capsim_sdk.model.rules import AuctionRule

logger = logging.getLogger("capsim.diagnostics")


class SmoothnessResult(Model):
    gamma: float
    epsilon: float
    trials: int
    violations: int
    frequency: float = Field(ge=0, le=1)


class AssumptionReport(Model):
    """
    Empirical check of the bounded-contribution and smoothness assumptions for one rule on one event stream.

    * **declared_C**: `float` - The rule's declared bound for this stream.
    * **empirical_C**: `float` - N times the largest sampled increment.
    * **bound_holds**: `bool` - `declared_C` is at least `empirical_C`.
    * **smoothness**: `SmoothnessResult` - Violation frequency of the smoothness inequality.
    * **smoothness_holds**: `bool` - The frequency does not exceed `delta`.
    """

    declared_C: float
    empirical_C: float
    bound_holds: bool
    smoothness: SmoothnessResult
    smoothness_holds: bool


def estimate_C(
    events: EventStream,
    rule: AuctionRule,
    activations: Iterable,
    positions=None,
    reducer: Optional[ChunkReducer] = None,
) -> float:
    """
    N times the largest increment over the sampled events and activations, a lower bound on any valid C.

    `positions` restricts the events examined (0-based); N is always the full stream length.
    """
    activations = [np.asarray(a, dtype=bool) for a in activations]
    N = len(events)
    rows = np.arange(N) if positions is None else np.asarray(positions, dtype=np.int64)
    if rows.shape[0] == 0 or not activations:
        raise EmptySampleError()
    reducer = reducer or ChunkReducer()

    largest = 0.0
    for a in activations:
        for lo, hi in reducer.ranges(0, rows.shape[0]):
            block = rule.spends(events, rows[lo:hi], a)
            largest = max(largest, float(block.max(initial=0.0)))
    return N * largest


def check_smoothness(
    events: EventStream,
    rule: AuctionRule,
    gamma: float,
    epsilon: float,
    trials: int,
    seed: int,
    max_span: Optional[int] = None,
) -> SmoothnessResult:
    """
    Monte-Carlo estimate of how often removing one campaign shifts another campaign's spend by more than the
    smoothness inequality allows.

    Each trial draws distinct campaigns c and c', an event range m..n (at most `max_span` events when given) and a
    random activation with c active, then compares the extra spend of c' over the range once c is removed against
    `gamma` times the spend of c plus `epsilon`.
    """
    if gamma < 0 or epsilon < 0:
        raise ValueError(
            f"gamma and epsilon must be nonnegative, got gamma={gamma}, epsilon={epsilon}."
        )
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}.")
    N = len(events)
    if N == 0:
        raise EmptySampleError()
    K = rule.n_campaigns
    if K < 2:
        logger.warning("Smoothness needs two campaigns, nothing to check for K=1.")
        return SmoothnessResult(
            gamma=gamma, epsilon=epsilon, trials=trials, violations=0, frequency=0.0
        )

    rng = np.random.default_rng(seed)
    violations = 0
    for _ in range(trials):
        c, c_other = rng.choice(K, size=2, replace=False)
        m, n = np.sort(rng.integers(0, N, size=2))
        if max_span is not None and n - m + 1 > max_span:
            n = m + max_span - 1
        a = rng.random(K) < 0.5
        a[c] = True
        without = a.copy()
        without[c] = False

        rows = slice(int(m), int(n) + 1)
        with_c = rule.spends(events, rows, a)
        without_c = rule.spends(events, rows, without)
        shift = without_c[:, c_other].sum() - with_c[:, c_other].sum()
        if shift > gamma * with_c[:, c].sum() + epsilon:
            violations += 1

    frequency = violations / trials
    logger.info(
        f"Smoothness gamma={gamma} epsilon={epsilon}: {violations}/{trials} violations."
    )
    return SmoothnessResult(
        gamma=gamma,
        epsilon=epsilon,
        trials=trials,
        violations=violations,
        frequency=frequency,
    )


def diagnose_assumptions(
    events: EventStream,
    rule: AuctionRule,
    params: AssumptionParams,
    trials: int = 1000,
    seed: int = 0,
    n_activations: int = 8,
    max_span: Optional[int] = None,
    reducer: Optional[ChunkReducer] = None,
) -> AssumptionReport:
    """
    Runs `estimate_C` (full activation plus `n_activations` random ones) and `check_smoothness`, and warns when the
    declared bound is below the empirical one.
    """
    rng = np.random.default_rng(seed)
    K = rule.n_campaigns
    activations = [np.ones(K, dtype=bool)] + [
        rng.random(K) < 0.5 for _ in range(n_activations)
    ]
    empirical = estimate_C(events, rule, activations, reducer=reducer)
    declared = params.C
    if declared < empirical:
        logger.warning(
            f"Declared C={declared} is below the empirical bound {empirical}; the small-contribution assumption "
            f"does not hold as declared."
        )
    smoothness = check_smoothness(
        events,
        rule,
        gamma=params.gamma,
        epsilon=params.epsilon,
        trials=trials,
        seed=seed,
        max_span=max_span,
    )
    return AssumptionReport(
        declared_C=declared,
        empirical_C=empirical,
        bound_holds=declared >= empirical,
        smoothness=smoothness,
        smoothness_holds=smoothness.frequency <= params.delta,
    )
