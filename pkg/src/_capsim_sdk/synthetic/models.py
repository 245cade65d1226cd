from typing import List
from typing import Optional
from typing import Union

from pydantic import Field
from pydantic import validator

from _capsim_sdk.core.models import Model

try:
    from typing import Literal
except ImportError:  # pragma: nocover
    from typing_extensions import Literal


class SyntheticConfig(Model):
    """
    Geometry of a synthetic embedding instance.

    **Fields**:

    * **n_events**: `int` - N.
    * **n_campaigns**: `int` - K.
    * **dim**: `int` - Embedding dimension d.
    * **b_base**: `float | "auto"` - Base budget; campaign k gets k * b_base. `"auto"` calibrates it so that about
        `target_fraction` of the campaigns cap out.
    * **seed**: `int` - Fully determines events, campaign vectors and (calibrated) budgets.
    * **noise_scale**: `float` - Weight of the per-event noise around the shared base embedding. Defaults to 3.
    * **target_fraction**: `float` - Capped fraction aimed at by calibration.
    * **calibration_tolerance**: `float` - Accepted distance of the calibrated capped fraction from the target.
    """

    n_events: int = Field(10_000, ge=1)
    n_campaigns: int = Field(20, ge=1)
    dim: int = Field(10, ge=1)
    b_base: Union[Literal["auto"], float] = "auto"
    seed: int = 0
    noise_scale: float = Field(3.0, ge=0)
    target_fraction: float = Field(0.5, gt=0, lt=1)
    calibration_tolerance: float = Field(0.1, gt=0)

    @validator("b_base")
    def _validate_b_base(cls, value):  # noqa
        if value != "auto" and value <= 0:
            raise ValueError("b_base must be positive or 'auto'.")
        return value

    @property
    def calibrated(self) -> bool:
        return self.b_base == "auto"


class CalibrationTrial(Model):
    b_base: float
    capped_fraction: float


class CalibrationResult(Model):
    b_base: float
    capped_fraction: float
    target_fraction: float
    trials: List[CalibrationTrial]
    monotone: bool
    converged: bool
    note: Optional[str] = None
