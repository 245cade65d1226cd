import json
import os

import click
from click._compat import get_text_stderr

from _capsim_cli import ERROR_LOG_FILE_NAME
from _capsim_cli import get_user_project_path


class CapsimCLIException(click.ClickException):
    """
    CLI error printed to stderr as a single JSON object, `{"error": <type>, "message": <text>}`, with exit code 1.
    `error` defaults to the class name; pass the library exception's type name to report that instead.
    """

    def __init__(self, message, error=None):
        self.error = error or self.__class__.__name__
        super().__init__(message)

    def as_dict(self):
        return {"error": self.error, "message": self.format_message()}

    def show(self, file=None):
        if file is None:
            file = get_text_stderr()
        click.echo(json.dumps(self.as_dict()), file=file)


class LoggedCLIError(CapsimCLIException):
    """Error whose details (traceback) went to the log file; the message points there."""

    def __init__(self, message=None, error=None):
        self.message = message
        super().__init__(message, error=error)

    def format_message(self):
        path = os.path.join(get_user_project_path("log"), ERROR_LOG_FILE_NAME)
        locations_message = f"View details in {path}"
        return f"{self.message}\n{locations_message}" if self.message else locations_message
