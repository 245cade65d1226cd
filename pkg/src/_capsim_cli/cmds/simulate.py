from pathlib import Path

import click

from _capsim_cli import console
from _capsim_cli import logging_options
from _capsim_cli import render
from _capsim_cli import threads_option
from _capsim_cli.cmds.options.output_options import out_dir_option
from _capsim_cli.cmds.options.output_options import output_options
from _capsim_cli.cmds.options.output_options import TableFormat
from _capsim_cli.cmds.options.run_options import estimator_kwargs
from _capsim_cli.cmds.options.run_options import estimator_options
from _capsim_cli.cmds.options.run_options import instance_argument
from _capsim_cli.cmds.options.run_options import seed_option
from _capsim_cli.core import CapsimCommand
from _capsim_sdk.core.engine import Engine
from _capsim_sdk.enums import SimulationMethod
from _capsim_sdk.estimator.models import EstimatorConfig
from _capsim_sdk.experiments.metrics import compare_trajectories
from _capsim_sdk.experiments.models import TrajectoryComparison
from _capsim_sdk.model.models import Trajectory
from _capsim_sdk.utils import write_csv


def trajectory_rows(
    trajectory: Trajectory,
    budgets,
    truth: Trajectory = None,
    comparison: TrajectoryComparison = None,
):
    for c in range(trajectory.n_campaigns):
        row = {
            "campaign": c + 1,
            "budget": budgets[c],
            "final_spend": trajectory.final_spends[c],
            "capping_time": trajectory.capping_times[c],
        }
        if comparison is not None:
            row["true_spend"] = truth.final_spends[c]
            row["true_capping_time"] = truth.capping_times[c]
            row["relative_error"] = comparison.relative_errors[c]
        yield row


@click.command(cls=CapsimCommand)
@instance_argument
@click.option(
    "--method",
    "-m",
    type=click.Choice([m.value for m in SimulationMethod]),
    default=SimulationMethod.SEQUENTIAL.value,
    help="'sequential' replays every event exactly; 'parallel' replays segment-wise; 's2a' estimates capping "
    "times on a sample and aggregates; 'naive' replays a --rho subsample with scaled increments.",
)
@click.option(
    "--no-refine",
    is_flag=True,
    default=False,
    help="Skip boundary refinement for the 's2a' method.",
)
@click.option(
    "--compare",
    is_flag=True,
    default=False,
    help="Also run the exact replay and report per-campaign relative errors against it.",
)
@estimator_options
@seed_option
@out_dir_option
@output_options
@threads_option
@logging_options
def simulate(instance, method, no_refine, compare, seed, out_dir, format_, columns, **kwargs):
    """
    Simulate the spend trajectory of an instance file.
    """
    engine = Engine()
    inst = engine.model.load(instance)
    method = SimulationMethod(method)
    cfg = EstimatorConfig(seed=seed, **estimator_kwargs(**kwargs))
    summary = None

    if method == SimulationMethod.SEQUENTIAL:
        trajectory = engine.sequential.simulate(inst)
    elif method == SimulationMethod.NAIVE:
        trajectory = engine.sequential.naive(inst, cfg.rho, seed)
    elif method == SimulationMethod.PARALLEL:
        report = engine.parallel.simulate(inst)
        trajectory = report.trajectory
        summary = f"{len(report.segments)} segments, {report.evaluations} auction evaluations."
    else:
        report = engine.s2a.run(inst, cfg, refine=not no_refine)
        trajectory = report.trajectory
        summary = (
            f"{report.trace.n_sweeps} sweeps, {report.evaluations.total} auction evaluations, "
            f"{len(report.failed_checks)} failed consistency checks."
        )

    truth = comparison = None
    if compare:
        truth = trajectory if method == SimulationMethod.SEQUENTIAL else engine.sequential.simulate(inst)
        comparison = compare_trajectories(truth, trajectory)
    rows = list(trajectory_rows(trajectory, inst.budgets, truth, comparison))

    if out_dir:
        Path(out_dir).mkdir(parents=True, exist_ok=True)
        write_csv(rows, Path(out_dir) / f"simulate-{method.value}.csv")

    render.rows(rows, format_, columns=columns, title=f"{method.value} trajectory")
    if format_ == TableFormat.table:
        console.print(
            f"{trajectory.n_capped} of {trajectory.n_campaigns} campaigns capped.", highlight=False
        )
        if summary:
            console.print(summary, highlight=False)
        if comparison is not None:
            console.print(
                f"Spend-weighted error against the exact replay: {render.number(comparison.weighted_error)}",
                highlight=False,
            )
