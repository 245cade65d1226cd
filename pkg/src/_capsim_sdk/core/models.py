from csv import DictReader

import numpy as np
from pydantic import BaseModel
from pydantic import root_validator
from pydantic import ValidationError


class CSVRowError(ValueError):
    """A CSV header or row failed validation; `line` is the physical line number, starting at 1."""

    def __init__(self, line, msg):
        self.line = line
        self.msg = msg
        super().__init__(f"Invalid data on CSV line {line}: {msg}")


def _encode_array(value: np.ndarray):
    return value.tolist()


def frozen_array(value, dtype=None) -> np.ndarray:
    """Coerce `value` to a read-only numpy array (copying when needed so callers can't mutate it through an alias)."""
    arr = np.array(value, dtype=dtype, copy=True)
    arr.setflags(write=False)
    return arr


class Model(BaseModel):
    """
    Subclass of pydantic's `BaseModel` shared by every capsim type.

    Models are immutable after construction and may carry numpy arrays. Arrays serialize to nested lists in `.json()`,
    and numpy scalars to their python equivalents.
    """

    class Config:
        allow_mutation = False
        arbitrary_types_allowed = True
        use_enum_values = True
        json_encoders = {
            np.ndarray: _encode_array,
            np.floating: float,
            np.integer: int,
            np.bool_: bool,
        }


class CSVModel(BaseModel, allow_population_by_field_name=True, extra="ignore"):
    """
    Pydantic model class enables multiple aliases to be assigned to a single field value. If the field is required
    then at least one of the aliases must be supplied or validation will fail.

    Useful when parsing CSV data from multiple sources where the expected column header names might vary.

    For example, a bid log could name its advertiser column either "advertiser_id" or "advertiser":

        class BidRow(CSVModel):
            advertiser_id: str = Field(csv_aliases=["advertiser_id", "advertiser"])

    If a CSV file has multiple alias columns pointing to the same field, the field will be populated by priority of
    the order of the `csv_aliases` list definition.
    """

    @root_validator(pre=True)
    def _alias_validator(cls, values):  # noqa
        for name, field in cls.__fields__.items():
            aliases = field.field_info.extra.get("csv_aliases", [])
            for alias in aliases:
                if alias in values and values[alias]:
                    values[name] = values[alias]
                    break
            else:  # no break
                if field.required and name not in values:
                    raise ValueError(
                        f"'{name}' required. Valid column aliases: {aliases}"
                    )

        return values

    @classmethod
    def parse_csv(cls, file):
        """
        Parse an open CSV file (header row first) into models, one per row.

        Raises `CSVRowError` naming the physical line number of the first header or row that fails validation.
        """
        try:
            first_line = next(file)
        except StopIteration:
            return
        headers = [h.strip() for h in first_line.strip().split(",")]
        try:
            cls._check_headers(headers)
        except ValueError as err:
            raise CSVRowError(1, f"header missing column: {err}")

        reader = DictReader(file, fieldnames=headers, restkey="extra")
        for row in reader:
            try:
                # coerce empty columns from "" to None
                row = {k: v or None for k, v in row.items()}
                yield cls(**row)
            except ValidationError as err:
                msg = err.errors()[0]["msg"]
                loc = err.errors()[0]["loc"][0]
                raise CSVRowError(reader.line_num + 1, f"{loc}: {msg}")

    @classmethod
    def _check_headers(cls, headers):
        for name, field in cls.__fields__.items():
            aliases = field.field_info.extra.get("csv_aliases", [name])
            if field.required and not any(a in headers for a in aliases):
                raise ValueError(f"'{name}' required. Valid column aliases: {aliases}")
