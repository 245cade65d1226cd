import click
from dotenv import dotenv_values

from _capsim_cli import logging_options
from _capsim_cli import render
from _capsim_cli import threads_option
from _capsim_cli.cmds.options.output_options import table_format_option
from _capsim_cli.core import CapsimCommand
from _capsim_cli.file_readers import AutoDecodedFile
from _capsim_sdk.core.engine import Engine
from _capsim_sdk.enums import ExperimentName
from _capsim_sdk.experiments.spec import spec_from_mapping


@click.command(cls=CapsimCommand)
@click.argument("name", type=click.Choice([e.value for e in ExperimentName]), required=False)
@click.option(
    "--config",
    "-c",
    "config",
    type=AutoDecodedFile("r"),
    default=None,
    help="Experiment config file: one `key=value` per line, list values comma-delimited, nested settings "
    "prefixed by their section (`instance_n_events=10000`, `estimator_rho=0.05`).",
)
@click.option("--seed", type=int, default=None, help="First repetition seed; overrides the config file.")
@click.option("--repetitions", type=click.IntRange(min=1), default=None, help="Overrides the config file.")
@click.option(
    "--out-dir",
    type=click.Path(file_okay=False, writable=True),
    default=None,
    help="Directory for <name>.csv and <name>.summary.json. Overrides the config file. [default: capsim-results]",
)
@table_format_option
@threads_option
@logging_options
def experiment(name, config, seed, repetitions, out_dir, format_):
    """
    Run a registered experiment and write its plot-ready CSV and summary JSON.

    NAME may be omitted when the config file sets `name=`. Experiments: sampling-error, parallel-vs-sequential,
    pi-convergence, s2a-vs-truth, day-shift, hoeffding, smoothness. The same config and seed produce
    byte-identical files for any --threads value.
    """
    mapping = dotenv_values(stream=config) if config else {}
    config_name = mapping.pop("name", None)
    name = name or config_name
    if not name:
        raise click.UsageError("Name an experiment, as an argument or as `name=` in the --config file.")
    spec = spec_from_mapping(
        mapping, name=name, seed=seed, repetitions=repetitions, out_dir=out_dir
    )
    result = Engine().experiments.run(spec)

    rows = [{"metric": key, **stats} for key, stats in result.summary["aggregate"].items()]
    render.rows(rows, format_, title=f"{name} ({spec.repetitions} repetitions)")
    click.echo(
        f"Wrote {result.n_rows} rows to {result.csv_path} and the summary to {result.summary_path}",
        err=True,
    )
