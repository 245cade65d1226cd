import numpy as np
import pytest
from pydantic import ValidationError

from _capsim_sdk.exceptions import CalibrationError
from _capsim_sdk.exceptions import DimensionMismatchError
from _capsim_sdk.model.instance import Instance
from _capsim_sdk.model.models import CampaignSet
from _capsim_sdk.sequential.simulate import simulate_sequential
from _capsim_sdk.synthetic.generate import assign_budgets
from _capsim_sdk.synthetic.generate import calibrate_base_budget
from _capsim_sdk.synthetic.generate import EVENT_BLOCK
from _capsim_sdk.synthetic.generate import generate_campaigns
from _capsim_sdk.synthetic.generate import generate_events
from _capsim_sdk.synthetic.generate import generate_instance
from _capsim_sdk.synthetic.generate import uniform_budgets
from _capsim_sdk.synthetic.models import SyntheticConfig
from _capsim_sdk.synthetic.valuation import valuation
from _capsim_sdk.synthetic.valuation import valuation_matrix


def test_assign_budgets():
    assert assign_budgets(3, 70).tolist() == [70.0, 140.0, 210.0]
    assert assign_budgets(1, 2.5).tolist() == [2.5]


@pytest.mark.parametrize("K,b_base", [(0, 1.0), (3, 0.0), (3, -1.0)])
def test_assign_budgets_rejects_invalid(K, b_base):
    with pytest.raises(ValueError):
        assign_budgets(K, b_base)


def test_valuation_of_orthogonal_vectors():
    assert valuation([1.0, 0.0], [0.0, 1.0]) == pytest.approx(0.1)


def test_valuation_is_clamped_at_one():
    assert valuation([10.0], [10.0]) == 1.0


def test_valuation_is_positive():
    assert valuation([10.0], [-10.0]) > 0


def test_valuation_dimension_mismatch():
    with pytest.raises(DimensionMismatchError):
        valuation([1.0, 2.0], [1.0])


def test_valuation_matrix_agrees_with_valuation():
    rng = np.random.default_rng(0)
    embeddings, vectors = rng.standard_normal((6, 3)), rng.standard_normal((4, 3))
    matrix = valuation_matrix(embeddings, vectors)
    assert matrix.shape == (6, 4)
    for i in range(6):
        for c in range(4):
            assert matrix[i, c] == pytest.approx(valuation(vectors[c], embeddings[i]))


def test_valuation_matrix_does_not_depend_on_batching():
    rng = np.random.default_rng(1)
    embeddings, vectors = rng.standard_normal((50, 5)), rng.standard_normal((3, 5))
    whole = valuation_matrix(embeddings, vectors)
    pieces = np.vstack([valuation_matrix(embeddings[i : i + 7], vectors) for i in range(0, 50, 7)])
    assert np.array_equal(whole, pieces)


def test_generation_is_deterministic():
    cfg = SyntheticConfig(n_events=300, n_campaigns=4, dim=3, b_base=1.0, seed=12)
    first, second = generate_instance(cfg), generate_instance(cfg)
    assert np.array_equal(first.events.payloads, second.events.payloads)
    assert np.array_equal(first.campaign_vectors, second.campaign_vectors)
    assert np.array_equal(first.budgets, second.budgets)


def test_different_seeds_give_different_events():
    a = generate_events(SyntheticConfig(n_events=10, dim=3, seed=1))
    b = generate_events(SyntheticConfig(n_events=10, dim=3, seed=2))
    assert not np.array_equal(a.payloads, b.payloads)


def test_longer_stream_extends_shorter_one():
    short = generate_events(SyntheticConfig(n_events=EVENT_BLOCK - 5, dim=2, seed=3))
    long = generate_events(SyntheticConfig(n_events=EVENT_BLOCK + 5, dim=2, seed=3))
    assert np.array_equal(long.payloads[: len(short)], short.payloads)


def test_campaign_vectors_shape():
    vectors = generate_campaigns(SyntheticConfig(n_campaigns=7, dim=5, seed=0))
    assert vectors.shape == (7, 5)


def test_generated_budgets_are_linear(small_instance):
    assert small_instance.budgets.tolist() == [20.0, 40.0, 60.0, 80.0, 100.0]


def test_first_price_spends_are_bounded_by_one(small_instance):
    rule = small_instance.rule()
    block = rule.spends(small_instance.events, slice(0, 200), np.ones(small_instance.n_campaigns, dtype=bool))
    assert (block.sum(axis=1) <= 1.0).all()
    assert (block > 0).sum(axis=1).tolist() == [1] * 200


@pytest.mark.parametrize("b_base", [0, -3.0, "manual"])
def test_config_rejects_invalid_b_base(b_base):
    with pytest.raises(ValidationError):
        SyntheticConfig(b_base=b_base)


def test_calibration_hits_target_fraction():
    cfg = SyntheticConfig(n_events=3000, n_campaigns=10, dim=4, seed=2)
    instance = generate_instance(cfg)
    truth = simulate_sequential(instance.events, instance.campaigns, instance.rule())
    assert abs(truth.capped_fraction() - cfg.target_fraction) <= cfg.calibration_tolerance


def test_calibration_records_trials(small_instance):
    result = calibrate_base_budget(small_instance.events, small_instance.rule(), target_fraction=0.4, tolerance=0.2)
    assert result.converged
    assert result.monotone
    assert len(result.trials) >= 2
    assert abs(result.capped_fraction - 0.4) <= 0.2


def test_calibration_outside_bracket(small_instance):
    with pytest.raises(CalibrationError):
        calibrate_base_budget(
            small_instance.events, small_instance.rule(), target_fraction=0.5, tolerance=0.01, low=1e8, high=1e9
        )


@pytest.mark.parametrize("target", [0.0, 1.0])
def test_calibration_rejects_degenerate_target(small_instance, target):
    with pytest.raises(ValueError):
        calibrate_base_budget(small_instance.events, small_instance.rule(), target_fraction=target)


def test_instance_with_budgets_keeps_events(small_instance):
    changed = small_instance.with_budgets([1.0] * small_instance.n_campaigns)
    assert isinstance(changed, Instance)
    assert np.array_equal(changed.events.payloads, small_instance.events.payloads)
    assert changed.budgets.tolist() == [1.0] * small_instance.n_campaigns


def test_zero_noise_puts_every_event_on_the_base_embedding():
    events = generate_events(SyntheticConfig(n_events=50, dim=3, b_base=1.0, noise_scale=0.0, seed=8))
    assert np.array_equal(events.payloads, np.tile(events.payloads[0], (50, 1)))


def test_event_mean_approaches_the_base_embedding():
    noisy = generate_events(SyntheticConfig(n_events=50_000, dim=4, b_base=1.0, seed=8))
    base = generate_events(SyntheticConfig(n_events=1, dim=4, b_base=1.0, noise_scale=0.0, seed=8)).payloads[0]
    # per-coordinate standard error is (3 / 4) / sqrt(N)
    assert noisy.payloads.mean(axis=0) == pytest.approx(base, abs=5 * 0.75 / np.sqrt(50_000))


def test_uniform_budgets():
    assert uniform_budgets(3, 2.5).tolist() == [2.5, 2.5, 2.5]
    with pytest.raises(ValueError):
        uniform_budgets(3, 0.0)


def test_calibration_with_uniform_budgets(small_instance):
    result = calibrate_base_budget(
        small_instance.events, small_instance.rule(), target_fraction=0.4, tolerance=0.2, budgets_for=uniform_budgets
    )
    capped = simulate_sequential(
        small_instance.events,
        CampaignSet(budgets=uniform_budgets(small_instance.n_campaigns, result.b_base)),
        small_instance.rule(),
    ).capped_fraction()
    assert capped == result.capped_fraction
    assert abs(capped - 0.4) <= 0.2
