from enum import Enum

import click


class TableFormat(str, Enum):
    table = "table"
    csv = "csv"
    json_lines = "json-lines"


table_format_option = click.option(
    "--format",
    "-f",
    "format_",
    type=click.Choice([f.value for f in TableFormat]),
    callback=lambda ctx, param, value: TableFormat(value),
    default=TableFormat.table.value,
    help="Format to print results: 'table', 'csv' or 'json-lines'.",
)

columns_option = click.option(
    "--columns",
    default=None,
    help="Comma-delimited column names. Limits output to the given columns, in that order.",
    callback=lambda ctx, param, value: value.split(",") if value is not None else None,
)

out_dir_option = click.option(
    "--out-dir",
    type=click.Path(file_okay=False, writable=True),
    default=None,
    help="Directory to write result files to. Nothing is written when omitted, except by commands that always "
    "produce files.",
)


def output_options(f):
    f = table_format_option(f)
    f = columns_option(f)
    return f
