import os
import site
import sys

import click

from _capsim_cli import console
from _capsim_cli import logging_options
from _capsim_cli.cmds.diagnose import diagnose
from _capsim_cli.cmds.estimate_pi import estimate_pi
from _capsim_cli.cmds.experiment import experiment
from _capsim_cli.cmds.generate import generate
from _capsim_cli.cmds.simulate import simulate
from _capsim_cli.core import ExceptionHandlingGroup
from _capsim_sdk.__version__ import __version__


@click.group(
    cls=ExceptionHandlingGroup,
    invoke_without_command=True,
    no_args_is_help=True,
    help=f"Simulation and capping-time estimation for budget-capped campaigns. Version {__version__}",
)
@click.option("--version", is_flag=True)
@click.option(
    "--python",
    is_flag=True,
    help="Print path to the python interpreter env that `capsim` is installed in.",
)
@click.option(
    "--script-dir",
    is_flag=True,
    help="Print the directory the `capsim` script was installed in (for adding to your PATH if needed).",
)
@logging_options
def capsim(version, python, script_dir):
    if version:
        console.print(__version__, highlight=False)
    if python:
        console.print(sys.executable, highlight=False)
        sys.exit(0)
    if script_dir:
        for base in (site.PREFIXES[0], site.USER_BASE):
            for root, _dirs, files in os.walk(base):
                if "capsim" in files or "capsim.exe" in files:
                    console.print(root, highlight=False)
                    sys.exit(0)


capsim.add_command(generate)
capsim.add_command(simulate)
capsim.add_command(estimate_pi)
capsim.add_command(experiment)
capsim.add_command(diagnose)

if __name__ == "__main__":
    capsim()
