import logging
from typing import Optional
from typing import Sequence

import numpy as np

from _capsim_sdk.core.reduce import ChunkReducer
from _capsim_sdk.exceptions import DimensionMismatchError
from _capsim_sdk.exceptions import EmptySampleError
from _capsim_sdk.experiments.models import HoeffdingConfig
from _capsim_sdk.experiments.models import HoeffdingRow
from _capsim_sdk.experiments.models import HoeffdingTable
from _capsim_sdk.model.diagnostics import estimate_C
from _capsim_sdk.model.models import EventStream
from _capsim_sdk.model.rules import AuctionRule

logger = logging.getLogger("capsim.experiments")


def default_t_grid(C: float, N: int, n_points: int = 10) -> np.ndarray:
    """Evenly spaced t from 0 to the value where the bound 2 exp(-2 N t^2 / C^2) falls to 1e-3."""
    return np.linspace(0.0, C * np.sqrt(np.log(2000.0) / (2.0 * N)), n_points)


def hoeffding_suite(
    events: EventStream,
    rule: AuctionRule,
    t_grid: Optional[Sequence[float]] = None,
    cfg: Optional[HoeffdingConfig] = None,
    seed: int = 0,
    reducer: Optional[ChunkReducer] = None,
) -> HoeffdingTable:
    """
    Concentration of prefix spends under random event order.

    With the activation and campaign fixed, computes each event's spend x_i once, then over `cfg.permutations`
    random orders measures how often |sum of the first n x's - n * mean(x)| >= t, for every t in `t_grid`. The
    tail frequency is tabulated against 2 exp(-2 N t^2 / C^2) with the effective C = N * max(x) from `estimate_C`.
    """
    cfg = cfg or HoeffdingConfig()
    reducer = reducer or ChunkReducer()
    N, K = len(events), rule.n_campaigns
    if N == 0:
        raise EmptySampleError("event stream")
    activation = (
        np.ones(K, dtype=bool)
        if cfg.activation is None
        else np.asarray(cfg.activation, dtype=bool)
    )
    if activation.shape[0] != K:
        raise DimensionMismatchError("activation", K, activation.shape[0])
    n = cfg.prefix if cfg.prefix is not None else max(1, N // 2)
    if n > N:
        raise ValueError(f"prefix {n} is longer than the stream ({N} events).")

    per_event = np.concatenate(
        [rule.spends(events, slice(lo, hi), activation) for lo, hi in reducer.ranges(0, N)]
    )
    if cfg.campaign is None:
        c = int(np.argmax(per_event.sum(axis=0)))
    else:
        c = cfg.campaign - 1
        if c >= K:
            raise IndexError(f"Campaign {cfg.campaign} is out of range [1..{K}].")
    x = per_event[:, c]
    F = float(x.mean())
    C = estimate_C(events, rule, [activation], reducer=reducer)
    if C <= 0:
        logger.warning(f"Campaign {c + 1} never spends under this activation; every deviation is 0.")

    rng = np.random.default_rng(seed)
    deviations = np.empty(cfg.permutations)
    for p in range(cfg.permutations):
        prefix = rng.choice(N, size=n, replace=False)
        deviations[p] = abs(float(x[prefix].sum()) - n * F)

    grid = default_t_grid(C, N, cfg.n_points) if t_grid is None else np.asarray(t_grid, dtype=np.float64)
    rows = []
    for t in grid:
        bound = 2.0 * np.exp(-2.0 * N * t * t / (C * C)) if C > 0 else (2.0 if t == 0 else 0.0)
        rows.append(
            HoeffdingRow(
                t=float(t),
                empirical_tail=float(np.mean(deviations >= t)),
                bound=float(bound),
            )
        )
    table = HoeffdingTable(n=n, campaign=c + 1, C=C, F=F, permutations=cfg.permutations, rows=rows)
    for row in table.violations:
        logger.warning(
            f"Empirical tail {row.empirical_tail:.4f} exceeds the bound {row.bound:.4f} at t={row.t:.6g}."
        )
    return table
