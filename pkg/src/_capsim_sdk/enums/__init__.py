import enum as _enum


class _Enum(str, _enum.Enum):
    """
    An `enum.Enum` subclass that enables string comparison (`Enum.MEMBER == "MEMBER"`) and better exceptions that show
    all possible values.
    """

    @classmethod
    def _missing_(cls, value):
        if value in cls.__members__:
            return None
        raise ValueError(
            f"'{value}' is not a valid {cls.__name__}. Expected one of {[member.value for member in cls]}"
        )


class PayloadKind(_Enum):
    EMBEDDING = "embedding"
    KEYWORD = "keyword"


class RateBasis(_Enum):
    EXACT_REMAINING = "exact-remaining-mean"
    SUBSAMPLED = "subsampled"
    CONSUMED_PREFIX = "consumed-prefix-mean"


class InitMode(_Enum):
    ONES = "ones"
    WARM_START = "warm-start"


class StepSchedule(_Enum):
    CONSTANT = "constant"
    INVERSE_SQRT = "inverse-sqrt"


class SimulationMethod(_Enum):
    SEQUENTIAL = "sequential"
    PARALLEL = "parallel"
    S2A = "s2a"
    NAIVE = "naive"


class ExperimentName(_Enum):
    SAMPLING_ERROR = "sampling-error"
    PARALLEL_VS_SEQUENTIAL = "parallel-vs-sequential"
    PI_CONVERGENCE = "pi-convergence"
    S2A_VS_TRUTH = "s2a-vs-truth"
    DAY_SHIFT = "day-shift"
    HOEFFDING = "hoeffding"
    SMOOTHNESS = "smoothness"


class DiagnosticName(_Enum):
    C = "C"
    SMOOTHNESS = "smoothness"
    HOEFFDING = "hoeffding"


class BoundaryIssue(_Enum):
    NOT_REACHED = "not-reached"
    ALREADY_EXHAUSTED = "already-exhausted"
    OUT_OF_ORDER = "out-of-order"
    UNSCHEDULED = "unscheduled"


class DayShiftMethod(_Enum):
    AS_IS = "as-is"
    RESCALED = "rescaled"
    S2A = "s2a"
