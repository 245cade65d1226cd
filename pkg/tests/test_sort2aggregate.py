import numpy as np
import pytest

from .conftest import ConstantRule
from .conftest import plain_events
from _capsim_sdk.core.reduce import ChunkReducer
from _capsim_sdk.core.reduce import fold
from _capsim_sdk.enums import BoundaryIssue
from _capsim_sdk.estimator.models import EstimatorConfig
from _capsim_sdk.exceptions import DimensionMismatchError
from _capsim_sdk.experiments.metrics import weighted_error
from _capsim_sdk.model.models import CampaignSet
from _capsim_sdk.sequential.simulate import naive_sampled_sequential
from _capsim_sdk.sequential.simulate import simulate_sequential
from _capsim_sdk.sort2aggregate.aggregate import aggregate_segments
from _capsim_sdk.sort2aggregate.aggregate import build_segment_plan
from _capsim_sdk.sort2aggregate.aggregate import cost_model
from _capsim_sdk.sort2aggregate.aggregate import refine_boundaries
from _capsim_sdk.sort2aggregate.aggregate import sort2aggregate
from _capsim_sdk.synthetic.generate import generate_instance
from _capsim_sdk.synthetic.models import SyntheticConfig


@pytest.fixture(scope="module")
def desk_instance():
    """N=20000, K=20, d=10 with b_base calibrated so that about half the campaigns cap."""
    return generate_instance(SyntheticConfig(n_events=20_000, n_campaigns=20, dim=10, seed=1))


def _bounds(plan):
    return [(s.start, s.end, s.capper) for s in plan.segments]


def test_empty_schedule_is_a_single_segment():
    plan = build_segment_plan([], 2, 1000)
    assert _bounds(plan) == [(1, 1000, None)]
    assert plan.segments[0].activation.tolist() == [True, True]
    assert not plan.is_refined


def test_schedule_becomes_segments():
    plan = build_segment_plan([(2, 100), (1, 400)], 2, 1000)
    assert _bounds(plan) == [(1, 100, 2), (101, 400, 1), (401, 1000, None)]
    assert [s.activation.tolist() for s in plan.segments] == [
        [True, True],
        [True, False],
        [False, False],
    ]


def test_last_boundary_at_horizon_leaves_no_tail_segment():
    plan = build_segment_plan([(1, 1000)], 1, 1000)
    assert _bounds(plan) == [(1, 1000, 1)]


def test_equal_times_are_pushed_apart():
    plan = build_segment_plan([(2, 10), (1, 10)], 2, 20)
    assert [(b.campaign, b.time) for b in plan.boundaries] == [(1, 10), (2, 11)]


def test_boundaries_pushed_past_horizon_are_dropped(caplog):
    plan = build_segment_plan([(1, 3), (2, 3), (3, 3)], 3, 4)
    assert [(b.campaign, b.time) for b in plan.boundaries] == [(1, 3), (2, 4)]
    assert "Dropping campaign 3" in caplog.text


@pytest.mark.parametrize(
    "schedule",
    [
        [(1, 10), (1, 20)],
        [(3, 10)],
        [(1, 0)],
        [(1, 1001)],
    ],
)
def test_invalid_schedule(schedule):
    with pytest.raises(ValueError):
        build_segment_plan(schedule, 2, 1000)


def test_toy_aggregate_of_all_active_segment(toy_events, coupled_rule):
    sums = aggregate_segments(toy_events, build_segment_plan([], 2, 4), coupled_rule)
    assert sums.shape == (1, 2)
    assert sums[0] == pytest.approx([1.2, 0.8])


def test_aggregate_requires_matching_stream(toy_events, coupled_rule):
    with pytest.raises(DimensionMismatchError):
        aggregate_segments(toy_events, build_segment_plan([], 2, 5), coupled_rule)


def test_refining_the_true_schedule_keeps_it(small_instance, reducer):
    rule = small_instance.rule()
    truth = simulate_sequential(small_instance.events, small_instance.campaigns, rule, reducer=reducer)
    assert truth.n_capped > 0
    schedule = [(e.campaign, e.time) for e in truth.capping_order]
    plan = build_segment_plan(schedule, small_instance.n_campaigns, small_instance.n_events)

    refined = refine_boundaries(small_instance.events, small_instance.campaigns, rule, plan, reducer=reducer)
    assert refined.boundaries == plan.boundaries
    assert refined.flags == []
    assert refined.is_refined

    sums = aggregate_segments(small_instance.events, refined, rule, reducer=reducer)
    assert sums.sum(axis=0) == pytest.approx(truth.final_spends)


def test_refine_moves_boundary_to_the_crossing(toy_events, toy_campaigns, coupled_rule):
    plan = build_segment_plan([(1, 1), (2, 3)], 2, 4)
    refined = refine_boundaries(toy_events, toy_campaigns, coupled_rule, plan, window_fraction=0.5)
    assert [(b.campaign, b.time) for b in refined.boundaries] == [(1, 2), (2, 4)]
    assert refined.flags == []


def test_refine_repairs_and_flags_a_swapped_order(toy_events, toy_campaigns, coupled_rule):
    plan = build_segment_plan([(2, 1), (1, 2)], 2, 4)
    refined = refine_boundaries(toy_events, toy_campaigns, coupled_rule, plan, window_fraction=0.0)
    assert [(f.campaign, f.issue) for f in refined.flags] == [(1, BoundaryIssue.OUT_OF_ORDER)]
    assert [(b.campaign, b.time) for b in refined.boundaries] == [(1, 2), (2, 4)]


def test_refine_adds_unscheduled_crossings():
    campaigns = CampaignSet(budgets=[0.45, 0.5])
    plan = build_segment_plan([], 2, 10)
    refined = refine_boundaries(plain_events(10), campaigns, ConstantRule([0.1, 0.3]), plan)
    assert [(b.campaign, b.time) for b in refined.boundaries] == [(2, 2), (1, 5)]
    assert [(f.campaign, f.issue) for f in refined.flags] == [
        (2, BoundaryIssue.UNSCHEDULED),
        (1, BoundaryIssue.UNSCHEDULED),
    ]


def test_scheduled_campaign_that_never_caps_stays_active():
    campaigns = CampaignSet(budgets=[0.25, 1.0])
    rule = ConstantRule([0.1, 0.01])
    plan = build_segment_plan([(1, 3), (2, 6)], 2, 10)
    refined = refine_boundaries(plain_events(10), campaigns, rule, plan)
    assert [(b.campaign, b.time) for b in refined.boundaries] == [(1, 3)]
    assert [(f.campaign, f.time, f.issue) for f in refined.flags] == [(2, 10, BoundaryIssue.NOT_REACHED)]
    assert refined.segments[-1].activation.tolist() == [False, True]
    sums = aggregate_segments(plain_events(10), refined, rule)
    assert sums.sum(axis=0) == pytest.approx([0.3, 0.1])

@pytest.mark.parametrize("bias", [0.7, 1.3])
def test_refine_recovers_the_replay_from_a_biased_schedule(desk_instance, bias):
    rule = desk_instance.rule()
    truth = simulate_sequential(desk_instance.events, desk_instance.campaigns, rule)
    N = desk_instance.n_events
    assert truth.n_capped >= 5
    schedule = [(e.campaign, min(N, max(1, int(bias * e.time)))) for e in truth.capping_order]
    plan = build_segment_plan(schedule, desk_instance.n_campaigns, N)

    refined = refine_boundaries(desk_instance.events, desk_instance.campaigns, rule, plan)
    assert [(b.campaign, b.time) for b in refined.boundaries] == [(e.campaign, e.time) for e in truth.capping_order]
    sums = aggregate_segments(desk_instance.events, refined, rule)
    assert np.array_equal(fold(sums, desk_instance.n_campaigns), truth.final_spends)


def test_refine_is_idempotent(desk_instance):
    rule = desk_instance.rule()
    truth = simulate_sequential(desk_instance.events, desk_instance.campaigns, rule)
    schedule = [(e.campaign, max(1, int(0.8 * e.time))) for e in truth.capping_order]
    plan = build_segment_plan(schedule, desk_instance.n_campaigns, desk_instance.n_events)
    once = refine_boundaries(desk_instance.events, desk_instance.campaigns, rule, plan)
    twice = refine_boundaries(desk_instance.events, desk_instance.campaigns, rule, once)
    assert twice.boundaries == once.boundaries
    assert twice.flags == []
    for first, second in zip(once.cached_sums, twice.cached_sums):
        assert (first is None) == (second is None)
        if first is not None:
            assert np.array_equal(first, second)


def test_refine_rejects_bad_window(toy_events, toy_campaigns, coupled_rule):
    with pytest.raises(ValueError):
        refine_boundaries(toy_events, toy_campaigns, coupled_rule, build_segment_plan([], 2, 4), window_fraction=2)


def test_uncapped_instance_equals_sequential(small_instance):
    instance = small_instance.with_budgets(np.full(small_instance.n_campaigns, 1e9))
    reducer = ChunkReducer(chunk_size=100, workers=4)
    rule = instance.rule()
    report = sort2aggregate(instance.events, instance.campaigns, rule, EstimatorConfig(T=3), reducer=reducer)
    truth = simulate_sequential(instance.events, instance.campaigns, rule, reducer=reducer)
    assert len(report.plan.segments) == 1
    assert np.array_equal(report.trajectory.final_spends, truth.final_spends)
    assert report.trajectory.capping_times == [None] * instance.n_campaigns
    assert report.consistent


def test_small_instance_is_consistent_after_refinement(small_instance):
    cfg = EstimatorConfig(rho=0.2, eta=0.05, T=30, seed=1)
    report = sort2aggregate(small_instance.events, small_instance.campaigns, small_instance.rule(), cfg)
    truth = simulate_sequential(small_instance.events, small_instance.campaigns, small_instance.rule())
    assert report.plan.is_refined
    for check in report.checks:
        assert check.discrepancy == pytest.approx(max(check.lower - check.spend, check.spend - check.upper, 0.0))
    assert len(report.checks) >= len(report.plan.boundaries)
    assert report.trajectory.n_events == truth.n_events


def test_evaluation_counts_match_cost_model(small_instance):
    cfg = EstimatorConfig(rho=0.05, T=4)
    report = sort2aggregate(small_instance.events, small_instance.campaigns, small_instance.rule(), cfg, refine=False)
    predicted = cost_model(small_instance.n_events, 1e-6, cfg.T, cfg.rho, 1)
    assert report.evaluations.estimation == predicted.estimation_evaluations
    assert report.evaluations.refinement == 0
    assert report.evaluations.aggregation == predicted.aggregation_evaluations


def test_cost_model():
    cost = cost_model(1_000_000, 1e-6, 50, 0.001, 8)
    assert cost.estimation_seconds == pytest.approx(0.00625)
    assert cost.aggregation_seconds == pytest.approx(0.125)
    assert cost.sequential_seconds == pytest.approx(1.0)
    assert cost.speedup == pytest.approx(1.0 / 0.13125)


@pytest.mark.parametrize("field", ["N", "A", "T", "rho", "n_cores"])
def test_cost_model_rejects_non_positive(field):
    kwargs = dict(N=10, A=1.0, T=1, rho=0.5, n_cores=1)
    kwargs[field] = 0
    with pytest.raises(ValueError):
        cost_model(**kwargs)


def test_simultaneous_crossers_follow_schedule_order():
    campaigns = CampaignSet(budgets=[0.05, 0.05])
    plan = build_segment_plan([(2, 2), (1, 3)], 2, 5)
    refined = refine_boundaries(plain_events(5), campaigns, ConstantRule([0.1, 0.1]), plan, window_fraction=0.0)
    assert [(b.campaign, b.time) for b in refined.boundaries] == [(2, 1), (1, 2)]
    assert [(f.campaign, f.issue) for f in refined.flags] == [(1, BoundaryIssue.ALREADY_EXHAUSTED)]


def test_refined_run_matches_the_replay_and_passes_every_check(desk_instance):
    rule = desk_instance.rule()
    truth = simulate_sequential(desk_instance.events, desk_instance.campaigns, rule)
    cfg = EstimatorConfig(rho=0.01, eta=0.01, T=50, seed=2)
    report = sort2aggregate(desk_instance.events, desk_instance.campaigns, rule, cfg)
    assert report.consistent
    assert weighted_error(truth, report.trajectory) <= 0.05
    assert report.trajectory.capping_times == truth.capping_times


def test_naive_subsampling_is_far_less_accurate(desk_instance):
    rule = desk_instance.rule()
    truth = simulate_sequential(desk_instance.events, desk_instance.campaigns, rule)
    naive, s2a = [], []
    for seed in range(7):
        sampled = naive_sampled_sequential(desk_instance.events, desk_instance.campaigns, rule, 0.01, seed)
        naive.append(weighted_error(truth, sampled))
        report = sort2aggregate(
            desk_instance.events, desk_instance.campaigns, rule, EstimatorConfig(rho=0.01, T=30, seed=seed)
        )
        s2a.append(weighted_error(truth, report.trajectory))
    assert np.median(naive) > 0
    assert np.median(naive) >= 3 * np.median(s2a)
