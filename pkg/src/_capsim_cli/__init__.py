import os

import click
from rich.console import Console

from _capsim_cli.utils import get_user_project_path


ERROR_LOG_FILE_NAME = "capsim_cli.log"
LOG_LEVEL_DEFAULT = "WARNING"
LOG_FILE_DEFAULT = str(os.path.join(get_user_project_path("log"), ERROR_LOG_FILE_NAME))
LOG_STDERR_DEFAULT = "FALSE"

console = Console()


def _env_callback(var, default=None, flag_value=None):
    """
    Builds a click callback that copies an option into a `CAPSIM_*` environment variable, so the settings of every
    `Engine` created by the command pick it up. An unset option falls back to `default` unless the variable is
    already set.
    """

    def callback(ctx, param, value):
        if not value:
            if default is not None and not os.environ.get(var):
                os.environ[var] = default
            return value
        os.environ[var] = flag_value if flag_value is not None else str(value)
        return value

    return callback


log_level_callback = _env_callback("CAPSIM_LOG_LEVEL", LOG_LEVEL_DEFAULT)
log_file_callback = _env_callback("CAPSIM_LOG_FILE", LOG_FILE_DEFAULT)
log_stderr_callback = _env_callback("CAPSIM_LOG_STDERR", LOG_STDERR_DEFAULT, flag_value="TRUE")
threads_callback = _env_callback("CAPSIM_WORKERS")


log_level_option = click.option(
    "--log-level",
    help="Set level for capsim logging.",
    callback=log_level_callback,
    expose_value=False,
)

log_file_option = click.option(
    "--log-file",
    help="Specify file path to write log output to.",
    callback=log_file_callback,
    expose_value=False,
)

log_stderr_option = click.option(
    "--log-stderr",
    "log_stderr",
    help="Enable logging to stderr.",
    default=False,
    is_flag=True,
    callback=log_stderr_callback,
    expose_value=False,
)

threads_option = click.option(
    "--threads",
    type=click.IntRange(min=1),
    help="Worker threads for chunked evaluation and experiment repetitions. Results do not depend on this value. "
    "Defaults to CAPSIM_WORKERS or 1.",
    callback=threads_callback,
    expose_value=False,
)


def logging_options(f):
    f = log_level_option(f)
    f = log_file_option(f)
    f = log_stderr_option(f)
    return f
