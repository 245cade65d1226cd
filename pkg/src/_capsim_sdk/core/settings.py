import logging
import warnings
from io import IOBase
from pathlib import Path
from typing import List
from typing import Union

from pydantic import BaseSettings
from pydantic import Field
from pydantic import root_validator
from pydantic import validator
from rich.console import Console
from rich.logging import RichHandler

from _capsim_sdk.enums import _Enum

_stderr_console = Console(stderr=True)

_std_log_formatter = logging.Formatter(
    fmt="%(asctime)s - %(name)s:%(levelname)s - %(message)s", datefmt="[%x %X]"
)
_rich_log_formatter = logging.Formatter(fmt="%(message)s", datefmt="[%x %X]")


class LogLevel(_Enum):
    ERROR = "ERROR"
    WARNING = "WARNING"
    WARN = "WARN"
    INFO = "INFO"
    DEBUG = "DEBUG"

    @property
    def numeric(self) -> int:
        return logging.WARNING if self == LogLevel.WARN else getattr(logging, self)


def _build_handlers(
    use_rich: bool, log_stderr: bool, log_file: Union[str, IOBase, None]
) -> List[logging.Handler]:
    handlers = []
    if log_stderr:
        if use_rich:
            handler = RichHandler(console=_stderr_console, rich_tracebacks=True)
            handler.setFormatter(_rich_log_formatter)
        else:
            handler = logging.StreamHandler()
            handler.setFormatter(_std_log_formatter)
        handlers.append(handler)

    if log_file:
        if use_rich:
            stream = (
                open(log_file, "a", encoding="utf-8")
                if isinstance(log_file, str)
                else log_file
            )
            handler = RichHandler(
                console=Console(file=stream, no_color=True, width=200),
                rich_tracebacks=True,
            )
            handler.setFormatter(_rich_log_formatter)
        else:
            if isinstance(log_file, str):
                handler = logging.FileHandler(filename=log_file, encoding="utf-8")
            else:
                handler = logging.StreamHandler(stream=log_file)
            handler.setFormatter(_std_log_formatter)
        handlers.append(handler)
    return handlers


class CapsimSettings(BaseSettings):
    """
    Runtime settings of a `capsim.Engine`.

    Every attribute can be passed to the `Engine` constructor, set on `engine.settings` afterwards, or read from the
    environment with a `CAPSIM_` prefix (`CAPSIM_WORKERS=8`). Values are looked up in this order:

    - Args passed to `Engine` constructor
    - Shell environment variables
    - An .env file in the current working directory
    - An .env file in `~/.config/capsim` directory

    **Attributes**:

    * **chunk_size**: `int` Events per reduction chunk. Defaults to 4096. env_var=`CAPSIM_CHUNK_SIZE`
    * **workers**: `int` Threads evaluating chunks and experiment repetitions. Results never depend on this value.
        Defaults to 1. env_var=`CAPSIM_WORKERS`
    * **table_cap**: `int` Largest (event x campaign) valuation table that gets precomputed; bigger instances evaluate
        valuations per chunk. Defaults to 20 000 000. env_var=`CAPSIM_TABLE_CAP`
    * **log_stderr**: `bool` Log to stderr. Defaults to True. env_var=`CAPSIM_LOG_STDERR`
    * **log_file**: `str` File path or file-like object receiving log output. env_var=`CAPSIM_LOG_FILE`
    * **log_level**: `int` Defaults to `logging.WARNING`. Accepts level names. env_var=`CAPSIM_LOG_LEVEL`
    * **logger**: `logging.Logger` Defaults to the `capsim` logger. A user-supplied logger is left exactly as given;
        the other log settings only apply to the default one.
    * **use_rich**: `bool` Format log output with [rich](https://rich.readthedocs.io). Defaults to True.
        env_var=`CAPSIM_USE_RICH`
    """

    chunk_size: int = Field(default=4096, env="capsim_chunk_size", gt=0)
    workers: int = Field(default=1, env="capsim_workers", gt=0)
    table_cap: int = Field(default=20_000_000, env="capsim_table_cap", ge=0)
    use_rich: bool = Field(default=True, env="capsim_use_rich")
    log_stderr: bool = Field(default=True, env="capsim_log_stderr")
    log_file: Union[str, Path, IOBase] = Field(default=None, env="capsim_log_file")
    log_level: Union[int, str] = Field(default=logging.WARNING, env="capsim_log_level")
    logger: logging.Logger = None

    def __init__(self, **kwargs):
        # None means "look it up" rather than "unset"
        kwargs = {k: v for k, v in kwargs.items() if v is not None}
        if Path(".env").exists():
            kwargs["_env_file"] = ".env"
        super().__init__(**kwargs)

    class Config:
        env_file = str(Path.home() / ".config" / "capsim" / ".env")
        validate_assignment = True
        arbitrary_types_allowed = True

    @validator("log_level", pre=True, always=True)
    def _validate_log_level(cls, value):  # noqa
        try:
            return int(value)
        except ValueError:
            return LogLevel(value.upper()).numeric

    @validator("log_file")
    def _validate_log_file(cls, value):  # noqa
        if not isinstance(value, (str, Path)):
            return value
        p = Path(value)
        writable = p.is_file() if p.exists() else p.parent.is_dir()
        if not writable:
            raise ValueError(f"{value} is not a valid file path for logging.")
        return str(p.absolute())

    @validator("logger")
    def _validate_logger(cls, value):  # noqa
        if value is None:
            logger = logging.getLogger("capsim")
            # marks loggers we own; anything without it was supplied by the user
            logger._capsim = True
            return logger
        if not isinstance(value, logging.Logger):
            raise ValueError(f"{value} is not a `logging.Logger`.")
        return value

    @root_validator(skip_on_failure=True)
    def _configure_logging(cls, values):  # noqa
        logger = values["logger"]
        if not hasattr(logger, "_capsim"):
            warnings.warn(
                "A custom logger has been set, all other log-related settings on the `capsim.Engine` are ignored for custom loggers.",
                stacklevel=2,
            )
            return values

        logger.handlers.clear()
        for handler in _build_handlers(
            values["use_rich"], values["log_stderr"], values["log_file"]
        ):
            logger.addHandler(handler)
        logger.setLevel(values["log_level"])
        return values

    def _log_error(self, err, invocation_str=None):
        message = str(err) if err else None
        if invocation_str:
            message = f"Exception occurred from input: '{invocation_str}'.\n{message}"
        if message:
            self.logger.error(message)

    def _log_verbose_error(self, invocation_str=None):
        """Log the active traceback, prefixed with the CLI invocation when there is one."""
        prefix = (
            f"Exception occurred from input: '{invocation_str}'."
            if invocation_str
            else "Exception occurred."
        )
        self.logger.exception(f"{prefix} See error below.")
