from pathlib import Path
from typing import Dict
from typing import Mapping
from typing import Optional
from typing import Tuple
from typing import Type
from typing import Union

from dotenv import dotenv_values
from pydantic import BaseModel
from pydantic.fields import SHAPE_SINGLETON

from _capsim_sdk.experiments.models import ExperimentSpec

# key prefix -> ExperimentSpec field holding a nested config
_SECTIONS = {
    "day_shift_": "day_shift",
    "estimator_": "estimator",
    "hoeffding_": "hoeffding",
    "instance_": "instance",
    "smoothness_": "smoothness",
}


def _coerce(model: Type[BaseModel], key: str, value) -> Tuple[str, object]:
    """
    Resolves `key` to a field of `model` ignoring case and splits comma separated values for list fields. Parsing of
    everything else is left to pydantic.
    """
    names = {name.lower(): name for name in model.__fields__}
    if key not in names:
        raise ValueError(f"Unknown {model.__name__} key '{key}'.")
    field = model.__fields__[names[key]]
    if field.shape != SHAPE_SINGLETON and isinstance(value, str):
        value = [v.strip() for v in value.split(",") if v.strip()]
    return field.name, value


def spec_from_mapping(mapping: Mapping[str, Optional[str]], **overrides) -> ExperimentSpec:
    """
    Build an `ExperimentSpec` from flat key-value pairs, as found in an experiment config file.

    Keys are case-insensitive. A key starting with `instance_`, `estimator_`, `day_shift_`, `hoeffding_` or
    `smoothness_` sets a field of that nested config (`estimator_rho=0.05`). List values are comma separated
    (`rhos=0.001,0.01`). Empty values are ignored. `overrides` are top-level fields applied last.

    Raises `ValueError` for keys that match no field, and `pydantic.ValidationError` for invalid values.
    """
    top: Dict[str, object] = {}
    nested: Dict[str, Dict[str, object]] = {}
    for raw_key, value in mapping.items():
        if value is None or value == "":
            continue
        key = raw_key.strip().lower()
        for prefix, section in _SECTIONS.items():
            if key.startswith(prefix):
                sub_model = ExperimentSpec.__fields__[section].type_
                sub_key = key[len(prefix) :]
                name, coerced = _coerce(sub_model, sub_key, value)
                nested.setdefault(section, {})[name] = coerced
                break
        else:
            name, coerced = _coerce(ExperimentSpec, key, value)
            top[name] = coerced

    top.update({k: v for k, v in overrides.items() if v is not None})
    for section, values in nested.items():
        top[section] = values
    return ExperimentSpec.parse_obj(top)


def load_spec_file(path: Union[str, Path], **overrides) -> ExperimentSpec:
    """Read an experiment config file in `.env` syntax (`name=sampling-error`, one `key=value` per line)."""
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"Experiment config file not found: {path}")
    return spec_from_mapping(dotenv_values(path), **overrides)
