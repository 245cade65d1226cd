from pathlib import Path

import click

from _capsim_cli import console
from _capsim_cli import logging_options
from _capsim_cli import threads_option
from _capsim_cli.cmds.options.run_options import bid_log_argument
from _capsim_cli.cmds.options.run_options import seed_option
from _capsim_cli.core import CapsimGroup
from _capsim_sdk.core.engine import Engine
from _capsim_sdk.synthetic.models import SyntheticConfig


def _b_base(ctx, param, value):
    if value is None or value == "auto":
        return "auto"
    try:
        return float(value)
    except ValueError:
        raise click.BadParameter("expected a positive number or 'auto'.")


def _instance_summary(instance, path):
    console.print(
        f"Wrote {instance.kind.value} instance with {instance.n_events} events and "
        f"{instance.n_campaigns} campaigns to {path}",
        highlight=False,
    )


@click.group(cls=CapsimGroup)
@logging_options
def generate():
    """Write instance files and bid log fixtures."""


@generate.command()
@click.option("--events", "n_events", type=int, default=10_000, help="Number of events N.")
@click.option("--campaigns", "n_campaigns", type=int, default=20, help="Number of campaigns K.")
@click.option("--dim", type=int, default=10, help="Embedding dimension.")
@click.option(
    "--b-base",
    callback=_b_base,
    default="auto",
    help="Base budget; campaign k gets k * b_base. 'auto' calibrates it to --target-fraction capped campaigns.",
)
@click.option("--noise-scale", type=float, default=3.0, help="Scale of the per-event noise.")
@click.option("--target-fraction", type=float, default=0.5, help="Capped fraction targeted by 'auto'.")
@seed_option
@click.option(
    "--output",
    "-o",
    type=click.Path(dir_okay=False, writable=True),
    default="instance.npz",
    help="Instance file to write.",
)
@threads_option
@logging_options
def synthetic(output, **kwargs):
    """
    Generate a synthetic embedding instance.
    """
    engine = Engine()
    instance = engine.synthetic.generate(SyntheticConfig(**kwargs))
    path = engine.model.save(instance, output)
    _instance_summary(instance, path)


@generate.command("bid-log")
@click.option("--keywords", "n_keywords", type=int, default=1000, help="Number of keywords.")
@click.option("--advertisers", "n_advertisers", type=int, default=50, help="Number of advertisers.")
@click.option("--days", default="1,2", help="Comma-delimited days to write records for.")
@seed_option
@click.option(
    "--output",
    "-o",
    type=click.Path(dir_okay=False, writable=True),
    default="bidlog.csv",
    help="CSV file to write; the manifest goes next to it.",
)
@logging_options
def bid_log(n_keywords, n_advertisers, days, seed, output):
    """
    Write a synthetic bid log CSV and its JSON manifest.
    """
    try:
        days = [int(d) for d in days.split(",") if d.strip()]
    except ValueError:
        raise click.BadParameter("expected comma-delimited integers.", param_hint="--days")
    manifest = Engine().bidlog.write_fixture(
        output, n_keywords=n_keywords, n_advertisers=n_advertisers, days=days, seed=seed
    )
    console.print(
        f"Wrote {manifest.n_records} records for days {manifest.days} to {output}", highlight=False
    )


@generate.command()
@bid_log_argument
@click.option("--day", type=int, default=1, help="Day of the log to build the keyword model from.")
@click.option("--events", "n_events", type=int, default=20_000, help="Number of keyword events to draw.")
@click.option("--budget", type=float, required=True, help="Budget of every advertiser.")
@seed_option
@click.option(
    "--output",
    "-o",
    type=click.Path(dir_okay=False, writable=True),
    default="instance.npz",
    help="Instance file to write.",
)
@click.option(
    "--model-output",
    type=click.Path(dir_okay=False, writable=True),
    default=None,
    help="Also write the keyword model as JSON.",
)
@logging_options
def keyword(bid_log, day, n_events, budget, seed, output, model_output):
    """
    Generate a keyword instance from one day of a bid log, with a uniform budget.
    """
    engine = Engine()
    model = engine.bidlog.keyword_model(engine.bidlog.load(bid_log), day)
    if model_output:
        engine.bidlog.write_model(model, Path(model_output))
    budgets = [budget] * len(model.advertiser_ids)
    instance = engine.bidlog.instance(model, n_events, budgets, seed=seed)
    path = engine.model.save(instance, output)
    _instance_summary(instance, path)
