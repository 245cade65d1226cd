import difflib
import re

import click
from pydantic import ValidationError

from _capsim_cli.exceptions import CapsimCLIException
from _capsim_cli.exceptions import LoggedCLIError
from _capsim_sdk.core.settings import CapsimSettings
from _capsim_sdk.exceptions import CapsimException

_DIFFLIB_CUT_OFF = 0.6

CONTEXT_SETTINGS = {"help_option_names": ["-h", "--help"], "show_default": True}


class CapsimCommand(click.Command):
    def __init__(self, *args, **kwargs):
        kwargs.setdefault("context_settings", CONTEXT_SETTINGS)
        super().__init__(*args, **kwargs)


class CapsimGroup(click.Group):
    command_class = CapsimCommand

    def __init__(self, *args, **kwargs):
        kwargs.setdefault("context_settings", CONTEXT_SETTINGS)
        super().__init__(*args, **kwargs)

    def list_commands(self, ctx):
        # registration order, not alphabetical
        return list(self.commands)


class ExceptionHandlingGroup(CapsimGroup):
    """
    Root group converting errors into `CapsimCLIException`s. Library and validation errors are logged and reported
    with their type; anything unexpected is logged with its traceback.
    """

    _original_args = None

    def make_context(self, info_name, args, parent=None, **extra):
        # grab the original command line arguments for logging purposes
        self._original_args = " ".join(args)

        return super().make_context(info_name, args, parent=parent, **extra)

    def invoke(self, ctx):
        try:
            return super().invoke(ctx)
        except click.UsageError as err:
            self._suggest_cmd(err)
        except LoggedCLIError:
            raise
        except click.exceptions.Exit:
            raise
        except click.ClickException:
            raise
        except (CapsimException, ValidationError, ValueError, OSError) as err:
            CapsimSettings()._log_error(err, self._original_args)
            raise CapsimCLIException(str(err), error=type(err).__name__)
        except Exception as err:
            CapsimSettings()._log_verbose_error(self._original_args)
            raise LoggedCLIError("Unknown problem occurred.", error=type(err).__name__)

    @staticmethod
    def _suggest_cmd(usage_err):
        """Adds close matches to a 'No such command' error."""
        if usage_err.message is not None:
            match = re.match("No such command '(.*)'.", usage_err.message)
            if match:
                bad_arg = match.groups()[0]
                available_commands = list(usage_err.ctx.command.commands.keys())
                suggested_commands = difflib.get_close_matches(
                    bad_arg, available_commands, cutoff=_DIFFLIB_CUT_OFF
                )
                if not suggested_commands:
                    raise usage_err
                usage_err.message = (
                    f"No such command '{bad_arg}'. "
                    f"Did you mean {' or '.join(suggested_commands)}?"
                )
        raise usage_err
