import numpy as np
import pytest
from pydantic import ValidationError

from .conftest import ConstantRule
from .conftest import plain_events
from _capsim_sdk.core.reduce import ChunkReducer
from _capsim_sdk.enums import InitMode
from _capsim_sdk.enums import StepSchedule
from _capsim_sdk.estimator.estimate import complementarity_violation
from _capsim_sdk.estimator.estimate import estimate_pi
from _capsim_sdk.estimator.estimate import pi_to_capping_schedule
from _capsim_sdk.estimator.estimate import vi_residual
from _capsim_sdk.estimator.models import EstimatorConfig
from _capsim_sdk.estimator.models import PiVector
from _capsim_sdk.exceptions import DimensionMismatchError
from _capsim_sdk.model.models import CampaignSet


@pytest.mark.parametrize(
    "pi,G,expected",
    [
        ([1.0], [-0.5], 0.0),
        ([0.5], [0.0], 0.0),
        ([0.5], [-0.2], 0.1),
        ([1.0], [0.3], 0.3),
        ([1.0, 0.5], [-1.0, -0.2], 0.1),
    ],
)
def test_complementarity_violation(pi, G, expected):
    assert complementarity_violation(pi, G) == pytest.approx(expected)


def test_complementarity_violation_accepts_pi_vector():
    assert complementarity_violation(PiVector(pi=[0.5]), [0.0]) == 0.0


def test_pi_vector_rejects_out_of_range():
    with pytest.raises(ValidationError):
        PiVector(pi=[0.5, 1.2])


def test_capping_schedule():
    schedule = pi_to_capping_schedule([0.25, 0.5], 1000)
    assert [(e.campaign, e.time) for e in schedule] == [(1, 250), (2, 500)]


def test_capping_schedule_skips_uncapped_and_sorts_by_time():
    assert pi_to_capping_schedule([1.0, 1.0], 1000) == []
    schedule = pi_to_capping_schedule([0.6, 1.0, 0.0001, 0.6], 1000)
    assert [(e.campaign, e.time) for e in schedule] == [(3, 1), (1, 600), (4, 600)]


def test_single_campaign_converges_to_budget_over_rate():
    N, x, budget = 2000, 0.1, 100.0
    cfg = EstimatorConfig(rho=0.1, eta=0.05, T=100, batch=20, tail_average=20, seed=5)
    pi, trace = estimate_pi(plain_events(N), CampaignSet(budgets=[budget]), ConstantRule([x]), cfg)
    assert pi.pi[0] == pytest.approx(budget / N / x, abs=0.03)
    assert trace.n_sweeps == 100
    assert trace.pi.shape == (100, 1)


def test_large_budgets_keep_every_campaign_active(small_instance):
    instance = small_instance.with_budgets(np.full(small_instance.n_campaigns, 1e9))
    pi, trace = estimate_pi(instance.events, instance.campaigns, instance.rule(), EstimatorConfig(T=5))
    assert np.array_equal(pi.pi, np.ones(instance.n_campaigns))
    assert not trace.complementarity.any()


def test_early_stop_once_tolerance_holds(small_instance):
    instance = small_instance.with_budgets(np.full(small_instance.n_campaigns, 1e9))
    _, trace = estimate_pi(
        instance.events, instance.campaigns, instance.rule(), EstimatorConfig(T=50, tolerance=1e-6)
    )
    assert trace.n_sweeps == 3
    assert trace.sweeps_to_tolerance(1e-6) == 1


def test_same_seed_same_estimate(small_instance):
    cfg = EstimatorConfig(rho=0.2, T=5, seed=11, step_schedule=StepSchedule.INVERSE_SQRT)
    first, _ = estimate_pi(small_instance.events, small_instance.campaigns, small_instance.rule(), cfg)
    second, _ = estimate_pi(small_instance.events, small_instance.campaigns, small_instance.rule(), cfg)
    assert np.array_equal(first.pi, second.pi)


def test_on_step_sees_every_update():
    seen = []
    cfg = EstimatorConfig(rho=0.5, T=3, batch=4)

    def _record(view):
        assert not view.flags.writeable
        seen.append(view.copy())

    estimate_pi(plain_events(40), CampaignSet(budgets=[1.0]), ConstantRule([0.1]), cfg, on_step=_record)
    assert len(seen) == 3 * 5


def test_warm_start_at_the_fixed_point_converges_in_fewer_sweeps():
    N = 20_000
    args = (plain_events(N), CampaignSet(budgets=[100.0]), ConstantRule([0.01]))
    base = EstimatorConfig(rho=0.1, eta=0.001, T=10, seed=3)
    _, cold = estimate_pi(*args, base)
    warm_cfg = base.warm_started([0.5])
    assert warm_cfg.init == InitMode.WARM_START
    _, warm = estimate_pi(*args, warm_cfg)
    tolerance = 1e-3
    assert warm.sweeps_to_tolerance(tolerance) == 1
    assert cold.sweeps_to_tolerance(tolerance) is None or cold.sweeps_to_tolerance(tolerance) > 1


def test_fixed_point_is_stable_and_responds_monotonically_to_budgets():
    N, rate = 20_000, 0.01
    budgets = [40.0, 100.0, 160.0]
    cfg = EstimatorConfig(rho=0.1, eta=0.01, T=30, batch=10, tail_average=10, seed=4).warm_started([0.2, 0.5, 0.8])
    pi, trace = estimate_pi(plain_events(N), CampaignSet(budgets=budgets), ConstantRule([rate] * 3), cfg)
    expected = np.array(budgets) / (N * rate)
    assert pi.pi == pytest.approx(expected, abs=0.05)
    assert np.all(np.diff(pi.pi) > 0)
    assert np.abs(trace.pi - expected).max() < 0.1


def test_warm_start_must_match_campaigns(small_instance):
    cfg = EstimatorConfig().warm_started([0.5])
    with pytest.raises(DimensionMismatchError):
        estimate_pi(small_instance.events, small_instance.campaigns, small_instance.rule(), cfg)


@pytest.mark.parametrize("warm_start", [None, [], [1.5]])
def test_warm_start_requires_valid_values(warm_start):
    with pytest.raises(ValidationError):
        EstimatorConfig(init=InitMode.WARM_START, warm_start=warm_start)


def test_rho_must_sample_something():
    with pytest.raises(ValueError):
        estimate_pi(plain_events(10), CampaignSet(budgets=[1.0]), ConstantRule([0.1]), EstimatorConfig(rho=0.01))


def test_residual_with_nobody_active_is_minus_budget(small_instance):
    G = vi_residual(
        np.zeros(small_instance.n_campaigns),
        small_instance.events,
        small_instance.campaigns,
        small_instance.rule(),
        mc_draws=2,
        seed=0,
    )
    assert np.array_equal(G, -small_instance.budgets)


def test_residual_of_constant_rule():
    N = 100
    G = vi_residual([1.0, 1.0], plain_events(N), CampaignSet(budgets=[5.0, 50.0]), ConstantRule([0.1, 0.2]), 1, 0)
    assert G == pytest.approx([N * 0.1 - 5.0, N * 0.2 - 50.0])
    per_event = vi_residual(
        [1.0, 1.0], plain_events(N), CampaignSet(budgets=[5.0, 50.0]), ConstantRule([0.1, 0.2]), 1, 0, per_event=True
    )
    assert per_event == pytest.approx(G / N)


def test_residual_does_not_depend_on_worker_count(small_instance):
    pi = np.full(small_instance.n_campaigns, 0.5)
    args = (small_instance.events, small_instance.campaigns, small_instance.rule())
    single = vi_residual(pi, *args, mc_draws=3, seed=1, reducer=ChunkReducer(100, 1))
    threaded = vi_residual(pi, *args, mc_draws=3, seed=1, reducer=ChunkReducer(100, 6))
    assert np.array_equal(single, threaded)


def test_residual_rejects_zero_draws(small_instance):
    with pytest.raises(ValueError):
        vi_residual(
            np.ones(small_instance.n_campaigns),
            small_instance.events,
            small_instance.campaigns,
            small_instance.rule(),
            mc_draws=0,
            seed=0,
        )


def test_capping_schedule_reads_pi_near_one_as_survival():
    schedule = pi_to_capping_schedule([0.5, 0.985, 0.97], 1000, survival_tolerance=0.02)
    assert [(e.campaign, e.time) for e in schedule] == [(1, 500), (3, 970)]
    assert pi_to_capping_schedule([0.985], 1000) != []


@pytest.mark.parametrize("tolerance", [-0.1, 1.0])
def test_capping_schedule_rejects_invalid_survival_tolerance(tolerance):
    with pytest.raises(ValueError):
        pi_to_capping_schedule([0.5], 1000, survival_tolerance=tolerance)
