# SPDX-FileCopyrightText: 2024-present capsim developers
#
# SPDX-License-Identifier: MIT
from . import enums
from . import models
from _capsim_sdk import exceptions
from _capsim_sdk.__version__ import __version__
from _capsim_sdk.core.engine import Engine
from _capsim_sdk.core.settings import CapsimSettings

__all__ = [
    "__version__",
    "Engine",
    "CapsimSettings",
    "enums",
    "models",
    "exceptions",
]

__locals = locals()
for __name in ("Engine", "CapsimSettings"):
    setattr(__locals[__name], "__module__", "capsim")  # noqa
