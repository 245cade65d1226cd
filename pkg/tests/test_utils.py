import csv

import numpy as np

from _capsim_sdk.model.models import CappingEvent
from _capsim_sdk.utils import format_value
from _capsim_sdk.utils import write_csv


def test_format_value():
    assert format_value(np.array([1.0, 2.0])) == [1.0, 2.0]
    assert type(format_value(np.float64(0.5))) is float
    assert type(format_value(np.int64(3))) is int
    assert format_value(CappingEvent(campaign=2, time=7)) == {"campaign": 2, "time": 7}
    assert format_value("as-is") == "as-is"


def test_write_csv_collects_columns_in_order_of_appearance(tmp_path):
    path = tmp_path / "rows.csv"
    n = write_csv(
        [
            {"campaign": 1, "spend": np.float64(0.25)},
            {"campaign": 2, "spend": 1.0, "capping_time": 40},
            {"campaign": 3, "spend": None},
        ],
        path,
    )
    assert n == 3
    with open(path, newline="") as file:
        rows = list(csv.DictReader(file))
    assert list(rows[0]) == ["campaign", "spend", "capping_time"]
    assert rows[0] == {"campaign": "1", "spend": "0.25", "capping_time": ""}
    assert rows[1]["capping_time"] == "40"
    assert rows[2]["spend"] == ""


def test_write_csv_without_rows(tmp_path):
    path = tmp_path / "empty.csv"
    assert write_csv([], path) == 0
    assert path.read_text().strip() == ""
