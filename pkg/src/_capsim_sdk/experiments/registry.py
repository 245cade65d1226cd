import logging
from typing import Callable
from typing import Dict
from typing import List
from typing import NamedTuple
from typing import Optional
from typing import Tuple

import numpy as np

from _capsim_sdk.bidlog.dayshift import day_shift_experiment
from _capsim_sdk.bidlog.ingest import build_keyword_model
from _capsim_sdk.bidlog.ingest import generate_bid_log_fixture
from _capsim_sdk.bidlog.ingest import load_bid_log
from _capsim_sdk.core.reduce import ChunkReducer
from _capsim_sdk.enums import ExperimentName
from _capsim_sdk.enums import SimulationMethod
from _capsim_sdk.estimator.estimate import estimate_pi
from _capsim_sdk.exceptions import UnknownExperimentError
from _capsim_sdk.experiments.hoeffding import hoeffding_suite
from _capsim_sdk.experiments.metrics import compare_trajectories
from _capsim_sdk.experiments.models import ExperimentSpec
from _capsim_sdk.model.diagnostics import check_smoothness
from _capsim_sdk.model.diagnostics import estimate_C
from _capsim_sdk.model.instance import Instance
from _capsim_sdk.model.models import Trajectory
from _capsim_sdk.parallel.simulate import parallel_simulate
from _capsim_sdk.sequential.simulate import naive_sampled_sequential
from _capsim_sdk.sequential.simulate import simulate_sequential
from _capsim_sdk.sort2aggregate.aggregate import cost_model
from _capsim_sdk.sort2aggregate.aggregate import sort2aggregate
from _capsim_sdk.synthetic.generate import generate_instance

logger = logging.getLogger("capsim.experiments")

Rows = List[dict]
RunnerResult = Tuple[Rows, dict]


class RunContext(NamedTuple):
    reducer: ChunkReducer
    table_cap: int


class Experiment(NamedTuple):
    """A registered experiment: `run` executes one repetition; `prepare` runs once before all repetitions."""

    name: ExperimentName
    run: Callable[[ExperimentSpec, int, RunContext], RunnerResult]
    prepare: Optional[Callable[[ExperimentSpec], ExperimentSpec]] = None


def _instance(spec: ExperimentSpec, seed: int, ctx: RunContext, **updates) -> Instance:
    cfg = spec.instance.copy(update={"seed": seed, **updates})
    return generate_instance(cfg, table_cap=ctx.table_cap, reducer=ctx.reducer)


def _campaign_rows(truth: Trajectory, estimate: Trajectory, budgets, **columns) -> Rows:
    comparison = compare_trajectories(truth, estimate)
    return [
        {
            **columns,
            "campaign": c + 1,
            "budget": float(budgets[c]),
            "true_spend": float(truth.final_spends[c]),
            "predicted_spend": float(estimate.final_spends[c]),
            "relative_error": comparison.relative_errors[c],
            "true_capping_time": truth.capping_times[c],
            "predicted_capping_time": estimate.capping_times[c],
        }
        for c in range(truth.n_campaigns)
    ]


def _stats(truth: Trajectory, estimate: Trajectory) -> dict:
    comparison = compare_trajectories(truth, estimate)
    return {
        "max_error": comparison.max_error,
        "median_error": comparison.median_error,
        "weighted_error": comparison.weighted_error,
        "error_last_campaign": comparison.relative_errors[-1],
        "n_excluded": comparison.n_excluded,
    }


def run_sampling_error(spec: ExperimentSpec, seed: int, ctx: RunContext) -> RunnerResult:
    """Naive subsampled replay against sort2aggregate, per sampling rate."""
    instance = _instance(spec, seed, ctx)
    rule = instance.rule(ctx.table_cap)
    truth = simulate_sequential(instance.events, instance.campaigns, rule, reducer=ctx.reducer)
    rows, summary = [], {}
    for rho in spec.rhos:
        naive = naive_sampled_sequential(
            instance.events, instance.campaigns, rule, rho, seed, reducer=ctx.reducer
        )
        s2a = sort2aggregate(
            instance.events,
            instance.campaigns,
            rule,
            spec.estimator.copy(update={"rho": rho, "seed": seed}),
            refine=spec.refine,
            reducer=ctx.reducer,
        )
        for method, estimate in ((SimulationMethod.NAIVE, naive), (SimulationMethod.S2A, s2a.trajectory)):
            rows.extend(_campaign_rows(truth, estimate, instance.budgets, rho=rho, method=method.value))
            summary[f"{method.value}@{rho}"] = _stats(truth, estimate)
    return rows, summary


def run_parallel_vs_sequential(spec: ExperimentSpec, seed: int, ctx: RunContext) -> RunnerResult:
    """Segment-wise parallel replay against the exact replay, per event count."""
    rows, summary = [], {}
    for N in spec.sizes:
        instance = _instance(spec, seed, ctx, n_events=N)
        rule = instance.rule(ctx.table_cap)
        truth = simulate_sequential(instance.events, instance.campaigns, rule, reducer=ctx.reducer)
        report = parallel_simulate(instance.events, instance.campaigns, rule, reducer=ctx.reducer)
        rows.extend(_campaign_rows(truth, report.trajectory, instance.budgets, n_events=N))
        summary[f"N={N}"] = {**_stats(truth, report.trajectory), "iterations": report.iterations}
    return rows, summary


def run_pi_convergence(spec: ExperimentSpec, seed: int, ctx: RunContext) -> RunnerResult:
    """Per-sweep estimator trace against the true capping fractions."""
    instance = _instance(spec, seed, ctx)
    rule = instance.rule(ctx.table_cap)
    truth = simulate_sequential(instance.events, instance.campaigns, rule, reducer=ctx.reducer)
    true_pi = truth.capping_fractions()
    pi, trace = estimate_pi(
        instance.events, instance.campaigns, rule, spec.estimator.copy(update={"seed": seed})
    )
    rows = [
        {**row.dict(), "true_pi": float(true_pi[row.campaign - 1])} for row in trace.rows()
    ]
    summary = {
        "sweeps": trace.n_sweeps,
        "final_complementarity": float(trace.complementarity[-1]),
        "sweeps_to_0.01": trace.sweeps_to_tolerance(1e-2),
        "max_pi_error": float(np.abs(pi.pi - true_pi).max()),
    }
    return rows, summary


def run_s2a_vs_truth(spec: ExperimentSpec, seed: int, ctx: RunContext) -> RunnerResult:
    """sort2aggregate against the exact replay, with consistency checks and evaluation counts."""
    instance = _instance(spec, seed, ctx)
    rule = instance.rule(ctx.table_cap)
    truth = simulate_sequential(instance.events, instance.campaigns, rule, reducer=ctx.reducer)
    report = sort2aggregate(
        instance.events,
        instance.campaigns,
        rule,
        spec.estimator.copy(update={"seed": seed}),
        refine=spec.refine,
        reducer=ctx.reducer,
    )
    rows = _campaign_rows(truth, report.trajectory, instance.budgets)
    for row in rows:
        row["estimated_pi"] = float(report.pi.pi[row["campaign"] - 1])
    predicted = cost_model(
        instance.n_events, 1.0, report.trace.n_sweeps, spec.estimator.rho, ctx.reducer.workers
    )
    summary = {
        **_stats(truth, report.trajectory),
        "consistent": report.consistent,
        "failed_checks": len(report.failed_checks),
        "flags": len(report.plan.flags),
        "evaluations": report.evaluations.dict(),
        "predicted_evaluations": {
            "estimation": predicted.estimation_evaluations,
            "aggregation": predicted.aggregation_evaluations,
        },
    }
    return rows, summary


def _prepare_day_shift(spec: ExperimentSpec) -> ExperimentSpec:
    if spec.bid_log is not None:
        return spec
    spec.out_dir.mkdir(parents=True, exist_ok=True)
    path = spec.out_dir / "bidlog-fixture.csv"
    days = sorted({spec.day_shift.day1, spec.day_shift.day2 or spec.day_shift.day1})
    generate_bid_log_fixture(path, days=days, seed=spec.seed)
    return spec.copy(update={"bid_log": path})


def run_day_shift(spec: ExperimentSpec, seed: int, ctx: RunContext) -> RunnerResult:
    """Day-2 spend predictions (as-is, rescaled, warm-started sort2aggregate) against the day-2 replay."""
    log = load_bid_log(spec.bid_log)
    cfg = spec.day_shift.copy(update={"seed": seed, "estimator": spec.estimator.copy(update={"seed": seed})})
    model_day1 = build_keyword_model(log, cfg.day1)
    model_day2 = build_keyword_model(log, cfg.day2) if cfg.day2 is not None else None
    report = day_shift_experiment(model_day1, cfg, model_day2=model_day2, reducer=ctx.reducer)
    rows = []
    for score in report.scores:
        for point in score.curve:
            c = point.campaign - 1
            rows.append(
                {
                    "method": score.method,
                    "rank": point.rank,
                    "campaign": point.campaign,
                    "true_spend": float(report.day2_spends[c]),
                    "predicted_spend": float(score.predicted_spends[c]),
                    "relative_error": score.relative_errors[c],
                    "spend_share": point.spend_share,
                    "cumulative_error": point.cumulative_error,
                }
            )
    summary = {
        "weighted_error": {s.method: s.weighted_error for s in report.scores},
        "best_method": report.best_method.value,
        "day1_capped": report.day1_capped,
        "day2_capped": report.day2_capped,
        "budget": float(report.budgets[0]),
        "n_excluded": report.n_excluded,
        "s2a_consistent": report.s2a_consistent,
    }
    return rows, summary


def run_hoeffding(spec: ExperimentSpec, seed: int, ctx: RunContext) -> RunnerResult:
    """Random-order tail frequencies of prefix spends against the concentration bound."""
    instance = _instance(spec, seed, ctx)
    rule = instance.rule(ctx.table_cap)
    table = hoeffding_suite(instance.events, rule, cfg=spec.hoeffding, seed=seed, reducer=ctx.reducer)
    rows = [{**row.dict(), "holds": row.holds} for row in table.rows]
    summary = {
        "n": table.n,
        "campaign": table.campaign,
        "C": table.C,
        "F": table.F,
        "violations": len(table.violations),
    }
    return rows, summary


def run_smoothness(spec: ExperimentSpec, seed: int, ctx: RunContext) -> RunnerResult:
    """Violation frequency of the smoothness inequality per gamma, plus declared and empirical C."""
    instance = _instance(spec, seed, ctx)
    rule = instance.rule(ctx.table_cap)
    cfg = spec.smoothness
    N, K = instance.n_events, instance.n_campaigns
    rng = np.random.default_rng(seed)
    activations = [np.ones(K, dtype=bool)] + list(rng.random((cfg.n_activations, K)) < 0.5)
    empirical_C = estimate_C(instance.events, rule, activations, reducer=ctx.reducer)
    rows = []
    for gamma in cfg.gammas:
        result = check_smoothness(
            instance.events, rule, gamma, cfg.epsilon, cfg.trials, seed, max_span=cfg.max_span
        )
        rows.append({**result.dict(), "declared_C": rule.declared_C(N), "empirical_C": empirical_C})
    summary = {
        "declared_C": rule.declared_C(N),
        "empirical_C": empirical_C,
        "frequency": {str(r["gamma"]): r["frequency"] for r in rows},
    }
    return rows, summary


REGISTRY: Dict[str, Experiment] = {
    e.name.value: e
    for e in (
        Experiment(ExperimentName.SAMPLING_ERROR, run_sampling_error),
        Experiment(ExperimentName.PARALLEL_VS_SEQUENTIAL, run_parallel_vs_sequential),
        Experiment(ExperimentName.PI_CONVERGENCE, run_pi_convergence),
        Experiment(ExperimentName.S2A_VS_TRUTH, run_s2a_vs_truth),
        Experiment(ExperimentName.DAY_SHIFT, run_day_shift, _prepare_day_shift),
        Experiment(ExperimentName.HOEFFDING, run_hoeffding),
        Experiment(ExperimentName.SMOOTHNESS, run_smoothness),
    )
}


def get_experiment(name) -> Experiment:
    key = getattr(name, "value", name)
    try:
        return REGISTRY[key]
    except KeyError:
        raise UnknownExperimentError(key)
