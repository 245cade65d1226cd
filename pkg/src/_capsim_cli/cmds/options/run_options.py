import click

from _capsim_cli.file_readers import AutoDecodedFile

seed_option = click.option(
    "--seed",
    type=int,
    default=0,
    help="Seed for every random draw of the command. Same seed, same output.",
)

instance_argument = click.argument(
    "instance",
    type=click.Path(exists=True, dir_okay=False),
)

bid_log_argument = click.argument(
    "bid_log",
    type=AutoDecodedFile("r"),
)


def estimator_options(f):
    """Options building an `EstimatorConfig`; unset ones keep the model defaults."""
    f = click.option("--rho", type=float, default=None, help="Sampling rate of the estimator. [default: 0.01]")(f)
    f = click.option("--eta", type=float, default=None, help="Step size. [default: 0.01]")(f)
    f = click.option("--sweeps", "T", type=int, default=None, help="Sweeps over the sample. [default: 50]")(f)
    f = click.option("--batch", type=int, default=None, help="Events per update. [default: 1]")(f)
    f = click.option(
        "--step-schedule",
        type=click.Choice(["constant", "inverse-sqrt"]),
        default=None,
        help="Step size schedule. [default: constant]",
    )(f)
    f = click.option(
        "--tail-average",
        type=int,
        default=None,
        help="Average the iterates of this many final sweeps. [default: 0]",
    )(f)
    f = click.option(
        "--tolerance",
        type=float,
        default=None,
        help="Stop once the complementarity violation stays below this value.",
    )(f)
    f = click.option(
        "--survival-tolerance",
        type=float,
        default=None,
        help="pi at or above 1 minus this value counts as never capping. [default: 0.02]",
    )(f)
    return f


def estimator_kwargs(**kwargs):
    keys = ("rho", "eta", "T", "batch", "step_schedule", "tail_average", "tolerance", "survival_tolerance")
    return {k: kwargs[k] for k in keys if kwargs.get(k) is not None}
