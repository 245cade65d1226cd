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
from _capsim_sdk.estimator.models import EstimatorConfig
from _capsim_sdk.utils import write_csv


@click.command("estimate-pi", cls=CapsimCommand)
@instance_argument
@estimator_options
@click.option(
    "--warm-start",
    default=None,
    help="Comma-delimited initial pi, one value per campaign. Defaults to starting every campaign at 1.",
    callback=lambda ctx, param, value: [float(v) for v in value.split(",")] if value else None,
)
@seed_option
@out_dir_option
@output_options
@threads_option
@logging_options
def estimate_pi(instance, warm_start, seed, out_dir, format_, columns, **kwargs):
    """
    Estimate the scaled capping time pi of every campaign from a sample of the events.

    pi near 1 means the campaign is not expected to cap; otherwise it caps near event round(pi * N). With --out-dir,
    the per-sweep trace is written to estimate-pi.trace.csv.
    """
    engine = Engine()
    inst = engine.model.load(instance)
    init = {"init": "warm-start", "warm_start": warm_start} if warm_start else {}
    cfg = EstimatorConfig(seed=seed, **init, **estimator_kwargs(**kwargs))
    pi, trace = engine.estimator.estimate(inst, cfg)
    times = {
        e.campaign: e.time
        for e in engine.estimator.schedule(pi, inst.n_events, cfg.survival_tolerance)
    }

    rows = [
        {
            "campaign": c + 1,
            "budget": inst.budgets[c],
            "pi": pi.pi[c],
            "estimated_capping_time": times.get(c + 1),
            "final_residual": trace.residual[-1, c],
        }
        for c in range(inst.n_campaigns)
    ]

    if out_dir:
        Path(out_dir).mkdir(parents=True, exist_ok=True)
        write_csv(rows, Path(out_dir) / "estimate-pi.csv")
        write_csv((r.dict() for r in trace.rows()), Path(out_dir) / "estimate-pi.trace.csv")

    render.rows(rows, format_, columns=columns, title="Estimated pi")
    if format_ == TableFormat.table:
        console.print(
            f"{trace.n_sweeps} sweeps at rho={cfg.rho}; final complementarity violation "
            f"{render.number(trace.complementarity[-1])}.",
            highlight=False,
        )
