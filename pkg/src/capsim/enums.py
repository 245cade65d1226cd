from _capsim_sdk.enums import BoundaryIssue
from _capsim_sdk.enums import DayShiftMethod
from _capsim_sdk.enums import DiagnosticName
from _capsim_sdk.enums import ExperimentName
from _capsim_sdk.enums import InitMode
from _capsim_sdk.enums import PayloadKind
from _capsim_sdk.enums import RateBasis
from _capsim_sdk.enums import SimulationMethod
from _capsim_sdk.enums import StepSchedule

__all__ = [
    "BoundaryIssue",
    "DayShiftMethod",
    "DiagnosticName",
    "ExperimentName",
    "InitMode",
    "PayloadKind",
    "RateBasis",
    "SimulationMethod",
    "StepSchedule",
]
