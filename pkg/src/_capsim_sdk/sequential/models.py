from pydantic import Field

from _capsim_sdk.core.models import Model


class SequentialConfig(Model):
    """
    Options for the exact sequential replay.

    **Fields**:

    * **checkpoint_stride**: `int` - Record cumulative spends every `checkpoint_stride` events. `0` disables.
    * **validate_contract**: `bool` - Check every increment against the rule contract. Defaults to True.
    """

    checkpoint_stride: int = Field(0, ge=0)
    validate_contract: bool = True
