from csv import DictWriter
from pathlib import Path
from typing import Any
from typing import Dict
from typing import Iterable
from typing import Mapping
from typing import Union

import numpy as np
from pydantic import BaseModel


def format_value(value: Any) -> Any:
    """Plain-python form of a value for CSV and tables: arrays become lists, numpy scalars python numbers."""
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, BaseModel):
        return value.dict()
    return value


def write_csv(rows: Iterable[Mapping[str, Any]], path: Union[str, Path]) -> int:
    """
    Write dict rows to `path` with a header naming every column, in order of first appearance. Missing values are
    left empty. Returns the number of rows written.
    """
    rows = [dict(r) for r in rows]
    headers: Dict[str, None] = {}
    for r in rows:
        headers.update(dict.fromkeys(r))
    with open(path, "w", newline="", encoding="utf-8") as file:
        writer = DictWriter(file, fieldnames=list(headers), restval="")
        writer.writeheader()
        for r in rows:
            writer.writerow({k: "" if v is None else format_value(v) for k, v in r.items()})
    return len(rows)
