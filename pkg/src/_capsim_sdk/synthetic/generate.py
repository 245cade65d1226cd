import logging
from typing import Callable
from typing import Optional

import numpy as np

from _capsim_sdk.core.reduce import ChunkReducer
from _capsim_sdk.enums import PayloadKind
from _capsim_sdk.exceptions import CalibrationError
from _capsim_sdk.model.instance import Instance
from _capsim_sdk.model.models import CampaignSet
from _capsim_sdk.model.models import EventStream
from _capsim_sdk.model.rules import AuctionRule
from _capsim_sdk.model.rules import DenseBidTable
from _capsim_sdk.model.rules import FirstPriceRule
from _capsim_sdk.sequential.models import SequentialConfig
from _capsim_sdk.sequential.simulate import simulate_sequential
from _capsim_sdk.synthetic.models import CalibrationResult
from _capsim_sdk.synthetic.models import CalibrationTrial
from _capsim_sdk.synthetic.models import SyntheticConfig

logger = logging.getLogger("capsim.synthetic")

# events per RNG substream; fixed so a seed gives the same events on any machine and any N split
EVENT_BLOCK = 65_536


def _generator(seed_seq: np.random.SeedSequence) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed_seq))


def _seed_tree(seed: int):
    """Children of the root sequence: base embedding, campaign vectors, event blocks."""
    return np.random.SeedSequence(seed).spawn(3)


def generate_events(cfg: SyntheticConfig) -> EventStream:
    """
    Events e_i = (e_base + noise_scale * xi_i) / 4 with e_base and xi_i standard normal in dimension d.

    e_base is drawn once per seed. Noise for events [j * EVENT_BLOCK, (j + 1) * EVENT_BLOCK) comes from the j-th
    child of the event substream, so a longer stream with the same seed extends a shorter one.
    """
    base_seq, _, events_seq = _seed_tree(cfg.seed)
    e_base = _generator(base_seq).standard_normal(cfg.dim)

    n_blocks = -(-cfg.n_events // EVENT_BLOCK)
    payloads = np.empty((cfg.n_events, cfg.dim))
    for j, block_seq in enumerate(events_seq.spawn(n_blocks)):
        lo = j * EVENT_BLOCK
        hi = min(lo + EVENT_BLOCK, cfg.n_events)
        noise = _generator(block_seq).standard_normal((hi - lo, cfg.dim))
        payloads[lo:hi] = (e_base + cfg.noise_scale * noise) / 4.0
    return EventStream(kind=PayloadKind.EMBEDDING, payloads=payloads)


def generate_campaigns(cfg: SyntheticConfig) -> np.ndarray:
    """(K, d) campaign vectors r_c drawn independently from N(0, I_d)."""
    _, campaigns_seq, _ = _seed_tree(cfg.seed)
    return _generator(campaigns_seq).standard_normal((cfg.n_campaigns, cfg.dim))


def assign_budgets(K: int, b_base: float) -> np.ndarray:
    """Budgets growing linearly with the campaign index: b^k = k * b_base."""
    if K < 1:
        raise ValueError(f"K must be >= 1, got {K}.")
    if b_base <= 0:
        raise ValueError(f"b_base must be positive, got {b_base}.")
    return np.arange(1, K + 1, dtype=np.float64) * b_base


def uniform_budgets(K: int, b_base: float) -> np.ndarray:
    """The same budget b_base for every campaign."""
    if K < 1:
        raise ValueError(f"K must be >= 1, got {K}.")
    if b_base <= 0:
        raise ValueError(f"b_base must be positive, got {b_base}.")
    return np.full(K, float(b_base))


def first_price_rule(valuations: np.ndarray) -> FirstPriceRule:
    """First-price rule over an (N, K) valuation table indexed by event id."""
    return FirstPriceRule(DenseBidTable(valuations))


def calibrate_base_budget(
    events: EventStream,
    rule: AuctionRule,
    target_fraction: float = 0.5,
    tolerance: float = 0.1,
    low: Optional[float] = None,
    high: Optional[float] = None,
    max_trials: int = 40,
    reducer: Optional[ChunkReducer] = None,
    budgets_for: Callable[[int, float], np.ndarray] = assign_budgets,
) -> CalibrationResult:
    """
    Bisects b_base on a log scale until the sequential replay caps a fraction of the campaigns within `tolerance` of
    `target_fraction`. `budgets_for(K, b_base)` turns b_base into the budget vector, linear in the campaign index
    by default.

    The default bracket runs from a thousandth of the largest possible increment to N times it, where no campaign
    can cap. Raises `CalibrationError` when the target lies outside the bracket's capped fractions.
    """
    if not 0 < target_fraction < 1:
        raise ValueError(f"target_fraction must be in (0, 1), got {target_fraction}.")
    N, K = len(events), rule.n_campaigns
    low = low if low is not None else rule.max_increment * 1e-3
    high = high if high is not None else rule.max_increment * N
    if not 0 < low < high:
        raise ValueError(f"Invalid calibration bracket [{low}, {high}].")
    replay_cfg = SequentialConfig(validate_contract=False)
    trials = []

    def _trial(b_base):
        trajectory = simulate_sequential(
            events,
            CampaignSet(budgets=budgets_for(K, b_base)),
            rule,
            replay_cfg,
            reducer=reducer,
        )
        trial = CalibrationTrial(b_base=b_base, capped_fraction=trajectory.capped_fraction())
        trials.append(trial)
        logger.info(f"Calibration trial b_base={b_base:.6g}: capped fraction {trial.capped_fraction:.3f}.")
        return trial.capped_fraction

    f_low, f_high = _trial(low), _trial(high)
    if not f_high - tolerance <= target_fraction <= f_low + tolerance:
        raise CalibrationError(target_fraction, f_low, f_high)

    lo, hi = low, high
    for _ in range(max_trials):
        mid = float(np.sqrt(lo * hi))
        fraction = _trial(mid)
        if abs(fraction - target_fraction) <= tolerance:
            break
        if fraction > target_fraction:
            lo = mid
        else:
            hi = mid

    ordered = sorted(trials, key=lambda p: p.b_base)
    monotone = all(
        a.capped_fraction >= b.capped_fraction for a, b in zip(ordered, ordered[1:])
    )
    if not monotone:
        logger.warning("Capped fraction is not monotone in b_base across calibration trials.")
    best = min(
        reversed(trials), key=lambda p: abs(p.capped_fraction - target_fraction)
    )
    converged = abs(best.capped_fraction - target_fraction) <= tolerance
    if not converged:
        logger.warning(
            f"Calibration stopped after {len(trials)} trials at capped fraction {best.capped_fraction:.3f}."
        )
    return CalibrationResult(
        b_base=best.b_base,
        capped_fraction=best.capped_fraction,
        target_fraction=target_fraction,
        trials=trials,
        monotone=monotone,
        converged=converged,
    )


def generate_instance(
    cfg: SyntheticConfig,
    table_cap: int = 20_000_000,
    reducer: Optional[ChunkReducer] = None,
) -> Instance:
    """Events, campaign vectors and linear budgets for `cfg`, calibrating b_base when it is `"auto"`."""
    events = generate_events(cfg)
    vectors = generate_campaigns(cfg)
    b_base = cfg.b_base
    if cfg.calibrated:
        trial_instance = Instance(
            events=events,
            campaigns=CampaignSet(budgets=np.ones(cfg.n_campaigns)),
            campaign_vectors=vectors,
            seed=cfg.seed,
        )
        result = calibrate_base_budget(
            events,
            trial_instance.rule(table_cap),
            target_fraction=cfg.target_fraction,
            tolerance=cfg.calibration_tolerance,
            reducer=reducer,
        )
        b_base = result.b_base
    return Instance(
        events=events,
        campaigns=CampaignSet(budgets=assign_budgets(cfg.n_campaigns, b_base)),
        campaign_vectors=vectors,
        seed=cfg.seed,
    )
