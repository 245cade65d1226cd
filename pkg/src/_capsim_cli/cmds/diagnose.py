import click
import numpy as np

from _capsim_cli import console
from _capsim_cli import logging_options
from _capsim_cli import render
from _capsim_cli import threads_option
from _capsim_cli.cmds.options.output_options import output_options
from _capsim_cli.cmds.options.output_options import TableFormat
from _capsim_cli.cmds.options.run_options import instance_argument
from _capsim_cli.cmds.options.run_options import seed_option
from _capsim_cli.core import CapsimGroup
from _capsim_cli.exceptions import CapsimCLIException
from _capsim_sdk.core.engine import Engine
from _capsim_sdk.experiments.models import HoeffdingConfig


@click.group(cls=CapsimGroup)
@logging_options
def diagnose():
    """Check the model assumptions on an instance."""


@diagnose.command("C")
@instance_argument
@click.option(
    "--activations",
    "n_activations",
    type=click.IntRange(min=0),
    default=8,
    help="Random activations examined in addition to the all-active one.",
)
@seed_option
@output_options
@threads_option
@logging_options
def c_bound(instance, n_activations, seed, format_, columns):
    """
    Compare the rule's declared small-contribution bound C with N times the largest increment observed.
    """
    engine = Engine()
    inst = engine.model.load(instance)
    rule = engine.model.rule(inst)
    rng = np.random.default_rng(seed)
    K = inst.n_campaigns
    activations = [np.ones(K, dtype=bool)] + [rng.random(K) < 0.5 for _ in range(n_activations)]
    empirical = engine.model.estimate_C(inst, activations, rule=rule)
    declared = rule.declared_C(inst.n_events)
    rows = [
        {
            "n_events": inst.n_events,
            "declared_C": declared,
            "empirical_C": empirical,
            "bound_holds": declared >= empirical,
        }
    ]
    render.rows(rows, format_, columns=columns, title="Small-contribution bound")


@diagnose.command()
@instance_argument
@click.option(
    "--gamma",
    "gammas",
    type=float,
    multiple=True,
    default=(0.0, 0.5, 1.0, 2.0),
    help="Smoothness constant; repeat to check several.",
)
@click.option("--epsilon", type=float, default=0.01, help="Additive slack of the inequality.")
@click.option("--trials", type=click.IntRange(min=1), default=1000, help="Random (position, activation) draws.")
@click.option("--max-span", type=click.IntRange(min=1), default=None, help="Longest event range compared.")
@seed_option
@output_options
@threads_option
@logging_options
def smoothness(instance, gammas, epsilon, trials, max_span, seed, format_, columns):
    """
    Frequency at which the smoothness inequality between two activations fails, per gamma.
    """
    engine = Engine()
    inst = engine.model.load(instance)
    rows = [
        engine.model.check_smoothness(inst, gamma, epsilon, trials, seed, max_span=max_span).dict()
        for gamma in gammas
    ]
    render.rows(rows, format_, columns=columns, title="Smoothness violations")


@diagnose.command()
@instance_argument
@click.option("--permutations", type=click.IntRange(min=100), default=1000, help="Random event orders drawn.")
@click.option("--points", "n_points", type=click.IntRange(min=2), default=10, help="Size of the t grid.")
@click.option("--prefix", type=click.IntRange(min=1), default=None, help="Prefix length n. [default: N // 2]")
@click.option(
    "--campaign",
    type=click.IntRange(min=1),
    default=None,
    help="Campaign examined. [default: largest spender]",
)
@click.option(
    "--strict",
    is_flag=True,
    default=False,
    help="Exit with an error when any empirical tail exceeds its bound.",
)
@seed_option
@output_options
@threads_option
@logging_options
def hoeffding(instance, permutations, n_points, prefix, campaign, strict, seed, format_, columns):
    """
    Tail frequencies of prefix spends over random event orders against the concentration bound.
    """
    engine = Engine()
    inst = engine.model.load(instance)
    cfg = HoeffdingConfig(permutations=permutations, n_points=n_points, prefix=prefix, campaign=campaign)
    table = engine.experiments.hoeffding(inst, cfg=cfg, seed=seed)
    rows = [{**row.dict(), "holds": row.holds} for row in table.rows]
    render.rows(rows, format_, columns=columns, title=f"Concentration, campaign {table.campaign}, n={table.n}")
    if format_ == TableFormat.table:
        console.print(f"C={render.number(table.C)}, F={render.number(table.F)}", highlight=False)
    if strict and table.violations:
        raise CapsimCLIException(
            f"{len(table.violations)} of {len(table.rows)} tail frequencies exceed the bound.",
            error="BoundViolation",
        )
