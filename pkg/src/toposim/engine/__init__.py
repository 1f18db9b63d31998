from .calibrate import CalibrationError, EstimationError, calibrate_X, estimate_Y, quantile_wait
from .cost import UNIT_PAIR_COST, account_cost, full_mesh_pairs
from .noninterference import (
    InconclusiveStream, NonInterferenceResult, NonInterferenceWindow, verify_noninterference,
)
from .parallel import ParallelAbort, measure_par
from .preprocess import (
    FWD_FUTURE, UNRESPONSIVE, UNSUPPORTED_CLIENT, PreprocessResult, preprocess_targets,
)
from .primitive import make_futures, measure_one_link
from .schedule import Iteration, build_schedule, expected_iterations, schedule_network, serial_network
from .scoring import score
from .types import (
    CONNECTED, INCONCLUSIVE, NOT_DETECTED, CostLedger, EdgeVerdict, MeasureConfig,
    MeasurementError, MeasurementReport, UnsupportedClient, jsonable,
)

__all__ = [
    "CONNECTED", "CalibrationError", "CostLedger", "EdgeVerdict", "EstimationError", "FWD_FUTURE",
    "INCONCLUSIVE", "InconclusiveStream", "Iteration", "MeasureConfig", "MeasurementError",
    "MeasurementReport", "NOT_DETECTED", "NonInterferenceResult", "NonInterferenceWindow",
    "ParallelAbort", "PreprocessResult", "UNIT_PAIR_COST", "UNRESPONSIVE", "UNSUPPORTED_CLIENT",
    "UnsupportedClient", "account_cost", "build_schedule", "calibrate_X", "estimate_Y",
    "expected_iterations", "full_mesh_pairs", "jsonable", "make_futures", "measure_one_link",
    "measure_par", "preprocess_targets", "quantile_wait", "schedule_network", "score", "serial_network",
    "verify_noninterference",
]
