import json
import math
import sys
from csv import DictWriter
from io import TextIOWrapper
from typing import Any
from typing import Dict
from typing import Iterable
from typing import List
from typing import Mapping
from typing import Optional

from rich.table import Table

from _capsim_cli import console
from _capsim_cli.cmds.options.output_options import TableFormat
from _capsim_sdk.utils import format_value


def number(value: Any) -> str:
    """Table cell text: floats to 6 significant digits, missing values as '-'."""
    value = format_value(value)
    if value is None or (isinstance(value, float) and math.isnan(value)):
        return "-"
    if isinstance(value, float):
        return f"{value:.6g}"
    return str(value)


def _headers(rows: List[Mapping[str, Any]], columns: Optional[List[str]]) -> List[str]:
    headers: Dict[str, None] = {}
    for r in rows:
        headers.update(dict.fromkeys(r))
    if not columns:
        return list(headers)
    unknown = [c for c in columns if c not in headers]
    if unknown:
        raise ValueError(f"Unknown columns {unknown}, expected any of {list(headers)}.")
    return list(columns)


def rows_as_table(rows: List[Mapping[str, Any]], columns: List[str] = None, title=None) -> Table:
    headers = _headers(rows, columns)
    tbl = Table(*headers, title=title)
    for r in rows:
        tbl.add_row(*(number(r.get(h)) for h in headers))
    return tbl


def table(rows: Iterable[Mapping[str, Any]], columns: List[str] = None, title=None):
    rows = list(rows)
    if not rows:
        console.print("No results found.")
        return
    console.print(rows_as_table(rows, columns, title), crop=False, soft_wrap=False, overflow="fold")


def csv(
    rows: Iterable[Mapping[str, Any]],
    columns: List[str] = None,
    file: TextIOWrapper = None,
):
    rows = list(rows)
    if not rows:
        console.print("No results found.")
        return
    writer = DictWriter(
        file or sys.stdout, fieldnames=_headers(rows, columns), extrasaction="ignore", restval=""
    )
    writer.writeheader()
    for r in rows:
        writer.writerow({k: "" if v is None else format_value(v) for k, v in r.items()})


def json_lines(rows: Iterable[Mapping[str, Any]], columns: List[str] = None):
    for r in rows:
        r = {k: format_value(v) for k, v in r.items() if not columns or k in columns}
        console.print(json.dumps(r), highlight=False, soft_wrap=True)


def rows(
    rows_: Iterable[Mapping[str, Any]],
    format_: TableFormat,
    columns: List[str] = None,
    title=None,
):
    """Prints dict rows in the chosen format."""
    if format_ == TableFormat.table:
        table(rows_, columns=columns, title=title)
    elif format_ == TableFormat.csv:
        csv(rows_, columns=columns)
    else:
        json_lines(rows_, columns=columns)
