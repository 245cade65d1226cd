from _capsim_sdk.bidlog.models import BidLog
from _capsim_sdk.bidlog.models import BidLogManifest
from _capsim_sdk.bidlog.models import DayShiftConfig
from _capsim_sdk.bidlog.models import DayShiftReport
from _capsim_sdk.bidlog.models import KeywordModel
from _capsim_sdk.estimator.models import ConvergenceTrace
from _capsim_sdk.estimator.models import EstimatorConfig
from _capsim_sdk.estimator.models import PiVector
from _capsim_sdk.experiments.models import ExperimentResult
from _capsim_sdk.experiments.models import ExperimentSpec
from _capsim_sdk.experiments.models import HoeffdingConfig
from _capsim_sdk.experiments.models import HoeffdingTable
from _capsim_sdk.experiments.models import SmoothnessConfig
from _capsim_sdk.experiments.models import TrajectoryComparison
from _capsim_sdk.model.instance import Instance
from _capsim_sdk.model.models import ActivationVector
from _capsim_sdk.model.models import AssumptionParams
from _capsim_sdk.model.models import CampaignSet
from _capsim_sdk.model.models import CappingEvent
from _capsim_sdk.model.models import Event
from _capsim_sdk.model.models import EventStream
from _capsim_sdk.model.models import SpendState
from _capsim_sdk.model.models import Trajectory
from _capsim_sdk.model.rules import AuctionRule
from _capsim_sdk.model.rules import FirstPriceRule
from _capsim_sdk.model.rules import ScaledRule
from _capsim_sdk.parallel.models import ParallelSimReport
from _capsim_sdk.parallel.models import RateBasisConfig
from _capsim_sdk.sequential.models import SequentialConfig
from _capsim_sdk.sort2aggregate.models import AggregateReport
from _capsim_sdk.sort2aggregate.models import CostEstimate
from _capsim_sdk.sort2aggregate.models import SegmentPlan
from _capsim_sdk.synthetic.models import CalibrationResult
from _capsim_sdk.synthetic.models import SyntheticConfig

__all__ = [
    "ActivationVector",
    "AggregateReport",
    "AssumptionParams",
    "AuctionRule",
    "BidLog",
    "BidLogManifest",
    "CalibrationResult",
    "CampaignSet",
    "CappingEvent",
    "ConvergenceTrace",
    "CostEstimate",
    "DayShiftConfig",
    "DayShiftReport",
    "EstimatorConfig",
    "Event",
    "EventStream",
    "ExperimentResult",
    "ExperimentSpec",
    "FirstPriceRule",
    "HoeffdingConfig",
    "HoeffdingTable",
    "Instance",
    "KeywordModel",
    "ParallelSimReport",
    "PiVector",
    "RateBasisConfig",
    "ScaledRule",
    "SegmentPlan",
    "SequentialConfig",
    "SmoothnessConfig",
    "SpendState",
    "SyntheticConfig",
    "Trajectory",
    "TrajectoryComparison",
]
