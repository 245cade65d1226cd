import numpy as np
import pytest
from pydantic import ValidationError

from .conftest import ConstantRule
from .conftest import CoupledRule
from .conftest import plain_events
from .conftest import ZeroRule
from _capsim_sdk.enums import PayloadKind
from _capsim_sdk.exceptions import ContractViolationError
from _capsim_sdk.exceptions import DimensionMismatchError
from _capsim_sdk.exceptions import EmptySampleError
from _capsim_sdk.model.activation import activation_from_state
from _capsim_sdk.model.activation import deactivate
from _capsim_sdk.model.diagnostics import check_smoothness
from _capsim_sdk.model.diagnostics import diagnose_assumptions
from _capsim_sdk.model.diagnostics import estimate_C
from _capsim_sdk.model.instance import Instance
from _capsim_sdk.model.models import ActivationVector
from _capsim_sdk.model.models import AssumptionParams
from _capsim_sdk.model.models import CampaignSet
from _capsim_sdk.model.models import EventStream
from _capsim_sdk.model.models import SpendState
from _capsim_sdk.model.models import Trajectory
from _capsim_sdk.model.rules import DenseBidTable
from _capsim_sdk.model.rules import FirstPriceRule
from _capsim_sdk.model.rules import KeywordBids
from _capsim_sdk.model.rules import ScaledRule
from _capsim_sdk.model.rules import validate_increments


@pytest.mark.parametrize(
    "spends,budgets,expected",
    [
        ((0, 0), (1, 1), (1, 1)),
        ((1.0, 0.2), (1.0, 1.0), (0, 1)),
        ((0.999, 1.001), (1, 1), (1, 0)),
    ],
)
def test_activation_from_state(spends, budgets, expected):
    a = activation_from_state(SpendState(spends=spends), CampaignSet(budgets=budgets))
    assert a.as_tuple() == expected


def test_activation_from_state_dimension_mismatch():
    with pytest.raises(DimensionMismatchError):
        activation_from_state(SpendState(spends=(0, 0, 0)), CampaignSet(budgets=(1, 1)))


@pytest.mark.parametrize(
    "bits,c,expected",
    [
        ((1, 1, 1), 2, (1, 0, 1)),
        ((1, 0, 1), 2, (1, 0, 1)),
        ((0, 0), 1, (0, 0)),
    ],
)
def test_deactivate(bits, c, expected):
    assert deactivate(ActivationVector(bits=bits), c).as_tuple() == expected


def test_deactivate_out_of_range():
    with pytest.raises(IndexError):
        deactivate(ActivationVector.all_active(2), 3)


def test_campaign_set_rejects_nonpositive_budgets():
    with pytest.raises(ValidationError):
        CampaignSet(budgets=[1.0, 0.0])
    with pytest.raises(ValidationError):
        CampaignSet(budgets=[])


def test_event_stream_take_keeps_source_ids():
    events = EventStream(kind=PayloadKind.KEYWORD, payloads=[5, 6, 7, 8])
    sub = events.take([3, 1])
    assert sub.ids.tolist() == [4, 2]
    assert sub.payloads.tolist() == [8, 6]
    assert [e.id for e in sub] == [4, 2]
    assert sub.event(0).payload == 8


def test_event_stream_is_read_only():
    events = plain_events(3, dim=2)
    assert events.dim == 2
    with pytest.raises(ValueError):
        events.payloads[0, 0] = 1.0


def test_trajectory_derives_capping_order():
    t = Trajectory(n_events=10, final_spends=[1, 2, 3], capping_times=[7, None, 3])
    assert [(e.campaign, e.time) for e in t.capping_order] == [(3, 3), (1, 7)]
    assert t.n_capped == 2
    assert t.capping_fractions().tolist() == [0.7, 1.0, 0.3]
    assert t.activation_at(3).tolist() == [True, True, False]


def test_first_price_rule_single_active_campaign_pays_its_bid():
    events = plain_events(1)
    rule = FirstPriceRule(DenseBidTable([[0.2, 0.7, 0.5]]))
    assert rule.spends(events, slice(0, 1), [True, False, False]).tolist() == [[0.2, 0, 0]]


def test_first_price_rule_deactivating_winner_reallocates_to_runner_up():
    events = plain_events(1)
    rule = FirstPriceRule(DenseBidTable([[0.2, 0.7, 0.5]]))
    assert rule.spends(events, slice(0, 1), [True, True, True]).tolist() == [[0, 0.7, 0]]
    assert rule.spends(events, slice(0, 1), [True, False, True]).tolist() == [[0, 0, 0.5]]


def test_first_price_rule_no_active_campaign_spends_nothing():
    events = plain_events(2)
    rule = FirstPriceRule(DenseBidTable([[0.2, 0.7], [0.1, 0.3]]))
    assert not rule.spends(events, slice(0, 2), [False, False]).any()


def test_first_price_rule_ties_go_to_lowest_index():
    rule = FirstPriceRule(DenseBidTable([[0.4, 0.4]]))
    assert rule.spends(plain_events(1), slice(0, 1), [True, True]).tolist() == [[0.4, 0]]


def test_keyword_rule_without_bidders_spends_nothing():
    events = EventStream(kind=PayloadKind.KEYWORD, payloads=[0, 1])
    rule = FirstPriceRule(KeywordBids([[0.0, 0.0], [0.0, 3.0]]))
    assert rule.spends(events, slice(0, 2), [True, True]).tolist() == [[0, 0], [0, 3.0]]


def test_rule_counts_evaluations():
    rule = ConstantRule([0.1, 0.2])
    rule.spends(plain_events(5), slice(0, 5), [True, True])
    rule.spends(plain_events(5), np.array([0, 3]), [True, False])
    assert rule.evaluations == 7
    rule.reset_evaluations()
    assert rule.evaluations == 0


def test_rule_rejects_wrong_activation_length():
    with pytest.raises(DimensionMismatchError):
        ConstantRule([0.1, 0.2]).spends(plain_events(1), slice(0, 1), [True])


def test_scaled_rule_multiplies_increments_and_counts_on_inner():
    inner = ConstantRule([0.1, 0.2])
    scaled = ScaledRule(inner, 10)
    out = scaled.spends(plain_events(2), slice(0, 2), [True, True])
    assert out == pytest.approx(np.array([[1.0, 2.0], [1.0, 2.0]]))
    assert scaled.evaluations == inner.evaluations == 2
    assert scaled.max_increment > 2.0


def test_scaled_rule_checks_activation_before_delegating(mocker):
    inner = ConstantRule([0.1, 0.2])
    spy = mocker.spy(inner, "spends")
    with pytest.raises(DimensionMismatchError):
        ScaledRule(inner, 10).spends(plain_events(2), slice(0, 2), [True])
    assert spy.call_count == 0
    assert inner.evaluations == 0


def test_validate_increments_rejects_contract_violations():
    active = np.array([True, False])
    with pytest.raises(ContractViolationError):
        validate_increments(np.array([[-0.1, 0]]), active, 1.0)
    with pytest.raises(ContractViolationError):
        validate_increments(np.array([[1.0, 0]]), active, 1.0)
    with pytest.raises(ContractViolationError):
        validate_increments(np.array([[0.1, 0.1]]), active, 1.0)
    validate_increments(np.array([[0.1, 0.0]]), active, 1.0)


def test_estimate_C_is_n_times_largest_increment(small_instance, reducer):
    rule = small_instance.rule()
    N = small_instance.n_events
    K = small_instance.n_campaigns
    expected = N * rule.spends(small_instance.events, slice(0, N), np.ones(K, dtype=bool)).max()
    assert estimate_C(small_instance.events, rule, [np.ones(K, dtype=bool)], reducer=reducer) == expected
    assert expected <= rule.declared_C(N)


def test_estimate_C_zero_rule():
    assert estimate_C(plain_events(10), ZeroRule(2), [[True, True]]) == 0


def test_estimate_C_empty_sample():
    with pytest.raises(EmptySampleError):
        estimate_C(plain_events(10), ZeroRule(2), [[True, True]], positions=[])


def test_check_smoothness_uncoupled_rule_never_violates():
    result = check_smoothness(plain_events(50), ConstantRule([0.1, 0.2, 0.3]), 0.5, 0.01, 200, seed=1)
    assert result.violations == 0
    assert result.frequency == 0


def test_check_smoothness_gamma_zero_on_coupled_rule_violates():
    result = check_smoothness(plain_events(20), CoupledRule(), 0.0, 0.0, 200, seed=1)
    assert result.frequency > 0


def test_check_smoothness_first_price_gamma_one(small_instance):
    rule = small_instance.rule()
    result = check_smoothness(small_instance.events, rule, 1.0, 0.01, 300, seed=0, max_span=200)
    assert result.frequency <= 0.05


def test_check_smoothness_rejects_negative_gamma():
    with pytest.raises(ValueError):
        check_smoothness(plain_events(5), CoupledRule(), -1.0, 0.0, 10, seed=0)


def test_check_smoothness_single_campaign_is_trivial():
    result = check_smoothness(plain_events(5), ConstantRule([0.1]), 1.0, 0.0, 10, seed=0)
    assert result.violations == 0


def test_diagnose_assumptions_warns_when_declared_C_is_too_small(small_instance, caplog):
    rule = small_instance.rule()
    params = AssumptionParams(C=1e-6, gamma=1.0, delta=0.1, epsilon=0.01)
    with caplog.at_level("WARNING", logger="capsim"):
        report = diagnose_assumptions(small_instance.events, rule, params, trials=50, seed=0)
    assert not report.bound_holds
    assert report.empirical_C > report.declared_C
    assert "below the empirical bound" in caplog.text


def test_instance_save_and_load(tmp_path, small_instance):
    path = small_instance.save(tmp_path / "instance.npz")
    loaded = Instance.load(path)
    assert loaded.n_events == small_instance.n_events
    assert loaded.seed == small_instance.seed
    assert np.array_equal(loaded.events.payloads, small_instance.events.payloads)
    assert np.array_equal(loaded.budgets, small_instance.budgets)
    assert np.array_equal(loaded.campaign_vectors, small_instance.campaign_vectors)


def test_instance_rule_without_table_matches_dense_table(small_instance):
    events = small_instance.events
    K = small_instance.n_campaigns
    active = np.ones(K, dtype=bool)
    dense = small_instance.rule(table_cap=10**9).spends(events, slice(0, 100), active)
    lazy = small_instance.rule(table_cap=0).spends(events, slice(0, 100), active)
    assert np.allclose(dense, lazy, rtol=1e-12, atol=0)


def test_instance_requires_matching_campaign_vectors():
    with pytest.raises(ValidationError):
        Instance(
            events=plain_events(3, dim=2),
            campaigns=CampaignSet(budgets=[1.0, 2.0]),
            campaign_vectors=np.zeros((3, 2)),
        )


@pytest.mark.parametrize("seed", range(5))
def test_inactive_campaigns_never_spend(small_instance, seed):
    rng = np.random.default_rng(seed)
    rule = small_instance.rule()
    for _ in range(20):
        n = int(rng.integers(1, 200))
        rows = np.sort(rng.choice(small_instance.n_events, size=n, replace=False))
        active = rng.random((n, small_instance.n_campaigns)) < rng.random()
        out = rule.spends(small_instance.events, rows, active)
        assert out.shape == active.shape
        assert np.all(out[~active] == 0)
        assert np.all(out >= 0)
        assert np.all(out < rule.max_increment)
