import json

import numpy as np
import pytest
from pydantic import ValidationError

from .conftest import ConstantRule
from .conftest import plain_events
from _capsim_sdk.core.engine import Engine
from _capsim_sdk.core.reduce import ChunkReducer
from _capsim_sdk.enums import ExperimentName
from _capsim_sdk.exceptions import EmptySampleError
from _capsim_sdk.exceptions import UnknownExperimentError
from _capsim_sdk.experiments.hoeffding import hoeffding_suite
from _capsim_sdk.experiments.metrics import compare_trajectories
from _capsim_sdk.experiments.metrics import cumulative_error_curve
from _capsim_sdk.experiments.metrics import weighted_error
from _capsim_sdk.experiments.models import HoeffdingConfig
from _capsim_sdk.experiments.registry import get_experiment
from _capsim_sdk.experiments.registry import REGISTRY
from _capsim_sdk.experiments.run import aggregate_summaries
from _capsim_sdk.experiments.run import run_experiment
from _capsim_sdk.experiments.spec import load_spec_file
from _capsim_sdk.experiments.spec import spec_from_mapping
from _capsim_sdk.model.models import Trajectory
from _capsim_sdk.parallel.simulate import parallel_simulate
from _capsim_sdk.sequential.simulate import simulate_sequential

SMALL_INSTANCE = {
    "instance_n_events": "400",
    "instance_n_campaigns": "4",
    "instance_dim": "3",
    "instance_b_base": "4",
    "estimator_rho": "0.1",
    "estimator_T": "5",
}


def _trajectory(spends, times):
    return Trajectory(n_events=10, final_spends=spends, capping_times=times)


def test_compare_identical_trajectories():
    t = _trajectory([1.0, 2.0], [5, None])
    comparison = compare_trajectories(t, t)
    assert comparison.relative_errors == [0.0, 0.0]
    assert comparison.max_error == 0.0
    assert comparison.weighted_error == 0.0
    assert comparison.capping_agreement == 1.0
    assert comparison.capping_time_deltas == [0, None]


def test_compare_scaled_spends():
    truth = _trajectory([1.0, 2.0], [None, None])
    estimate = _trajectory([1.1, 2.2], [None, 7])
    comparison = compare_trajectories(truth, estimate)
    assert comparison.relative_errors == pytest.approx([0.1, 0.1])
    assert comparison.weighted_error == pytest.approx(0.1)
    assert comparison.capping_agreement == 0.5


def test_compare_toy_parallel_against_sequential(toy_events, toy_campaigns, coupled_rule):
    truth = simulate_sequential(toy_events, toy_campaigns, coupled_rule)
    estimate = parallel_simulate(toy_events, toy_campaigns, coupled_rule).trajectory
    comparison = Engine().experiments.compare(truth, estimate)
    assert comparison.relative_errors == pytest.approx([0.5, 1 / 6])
    assert comparison.capping_time_deltas == [-1, -1]
    assert comparison.weighted_error == pytest.approx(0.5 / 1.8)


def test_compare_excludes_zero_spend():
    comparison = compare_trajectories(_trajectory([0.0, 2.0], [None, None]), _trajectory([1.0, 1.0], [None, None]))
    assert comparison.relative_errors == [None, 0.5]
    assert comparison.n_excluded == 1
    assert comparison.median_error == 0.5


def test_weighted_error_without_spend():
    with pytest.raises(EmptySampleError):
        weighted_error([0.0, 0.0], [1.0, 1.0])


def test_cumulative_error_curve_ranks_by_spend():
    curve = cumulative_error_curve([1.0, 3.0, 0.0], [2.0, 3.0, 5.0])
    assert [(p.rank, p.campaign) for p in curve] == [(1, 2), (2, 1)]
    assert [p.spend_share for p in curve] == pytest.approx([0.75, 1.0])
    assert curve[-1].cumulative_error == pytest.approx(weighted_error([1.0, 3.0, 0.0], [2.0, 3.0, 5.0]))


def test_hoeffding_at_zero(small_instance):
    table = hoeffding_suite(
        small_instance.events, small_instance.rule(), t_grid=[0.0], cfg=HoeffdingConfig(permutations=100)
    )
    row = table.rows[0]
    assert row.empirical_tail == 1.0
    assert row.bound == 2.0
    assert row.holds
    assert table.n == small_instance.n_events // 2


def test_hoeffding_default_grid(small_instance):
    table = hoeffding_suite(
        small_instance.events, small_instance.rule(), cfg=HoeffdingConfig(permutations=200, n_points=5), seed=3
    )
    assert len(table.rows) == 5
    assert table.rows[-1].bound == pytest.approx(1e-3)
    assert [r.t for r in table.rows] == sorted(r.t for r in table.rows)
    assert table.violations == []


def test_hoeffding_prefix_longer_than_stream():
    with pytest.raises(ValueError):
        hoeffding_suite(plain_events(10), ConstantRule([0.1]), cfg=HoeffdingConfig(permutations=100, prefix=11))


def test_hoeffding_requires_enough_permutations():
    with pytest.raises(ValidationError):
        HoeffdingConfig(permutations=10)


def test_spec_from_mapping():
    spec = spec_from_mapping(
        {
            "name": "s2a-vs-truth",
            "INSTANCE_N_EVENTS": "500",
            "estimator_rho": "0.05",
            "day_shift_n1": "100",
            "rhos": "0.01, 0.1",
            "repetitions": "2",
            "seed": "4",
            "refine": "",
        }
    )
    assert spec.name == ExperimentName.S2A_VS_TRUTH
    assert spec.instance.n_events == 500
    assert spec.estimator.rho == 0.05
    assert spec.day_shift.n1 == 100
    assert spec.rhos == [0.01, 0.1]
    assert spec.seeds == [4, 5]
    assert spec.refine is True


def test_spec_overrides_win():
    spec = spec_from_mapping({"name": "hoeffding", "seed": "1"}, seed=9, name=None)
    assert spec.seed == 9
    assert spec.name == ExperimentName.HOEFFDING


@pytest.mark.parametrize("key", ["nonsense", "estimator_nonsense", "instance_"])
def test_spec_rejects_unknown_keys(key):
    with pytest.raises(ValueError):
        spec_from_mapping({"name": "hoeffding", key: "1"})


def test_spec_rejects_mismatched_seeds():
    with pytest.raises(ValidationError):
        spec_from_mapping({"name": "hoeffding", "seeds": "1,2", "repetitions": "3"})


def test_load_spec_file(tmp_path):
    path = tmp_path / "experiment.env"
    path.write_text("name=pi-convergence\nestimator_T=7\n# comment\nrhos=0.5\n")
    spec = load_spec_file(path, repetitions=2)
    assert spec.name == ExperimentName.PI_CONVERGENCE
    assert spec.estimator.T == 7
    assert spec.repetitions == 2


def test_load_spec_file_missing(tmp_path):
    with pytest.raises(FileNotFoundError):
        load_spec_file(tmp_path / "missing.env")


def test_every_experiment_is_registered():
    assert set(REGISTRY) == {name.value for name in ExperimentName}


def test_unknown_experiment():
    with pytest.raises(UnknownExperimentError):
        get_experiment("not-an-experiment")


def test_aggregate_summaries():
    aggregate = aggregate_summaries(
        [{"a": 1, "b": {"c": 2.0}, "flag": True}, {"a": 3, "b": {"c": 4.0}, "d": 1}, {"a": 2, "b": {"c": 6.0}}]
    )
    assert aggregate == {
        "a": {"min": 1.0, "median": 2.0, "max": 3.0},
        "b.c": {"min": 2.0, "median": 4.0, "max": 6.0},
    }


@pytest.mark.parametrize(
    "name,extra",
    [
        ("s2a-vs-truth", {}),
        ("sampling-error", {"rhos": "0.1,0.5"}),
        ("parallel-vs-sequential", {"sizes": "200,400"}),
        ("pi-convergence", {}),
        ("hoeffding", {"hoeffding_permutations": "100"}),
        ("smoothness", {"smoothness_trials": "20", "smoothness_gammas": "0,1"}),
    ],
)
def test_run_experiment_writes_results(tmp_path, name, extra):
    spec = spec_from_mapping({"name": name, **SMALL_INSTANCE, **extra}, out_dir=tmp_path)
    result = run_experiment(spec, reducer=ChunkReducer(chunk_size=50))
    assert result.csv_path == tmp_path / f"{name}.csv"
    assert result.csv_path.is_file()
    summary = json.loads(result.summary_path.read_text())
    assert summary["spec"]["name"] == name
    assert len(summary["repetitions"]) == 1
    lines = result.csv_path.read_text().splitlines()
    assert lines[0].startswith("repetition,seed,")
    assert len(lines) == result.n_rows + 1


def test_run_experiment_does_not_depend_on_worker_count(tmp_path):
    outputs = []
    for workers in (1, 4):
        spec = spec_from_mapping(
            {"name": "s2a-vs-truth", "repetitions": "3", **SMALL_INSTANCE}, out_dir=tmp_path / str(workers)
        )
        result = run_experiment(spec, reducer=ChunkReducer(chunk_size=50, workers=workers))
        outputs.append((result.csv_path.read_text(), result.summary["aggregate"], result.summary["repetitions"]))
    assert outputs[0] == outputs[1]


def test_run_day_shift_generates_fixture(tmp_path):
    spec = spec_from_mapping(
        {"name": "day-shift", "day_shift_n1": "800", "day_shift_n2": "1200", "estimator_rho": "0.05"},
        out_dir=tmp_path,
    )
    result = Engine(workers=1).experiments.run(spec)
    assert (tmp_path / "bidlog-fixture.csv").is_file()
    summary = result.summary["repetitions"][0]
    assert set(summary["weighted_error"]) == {"as-is", "rescaled", "s2a"}
    assert summary["best_method"] in summary["weighted_error"]
