from .background import default_prices, inject_background, uniform_prices
from .config import SEED_ENV, ConfigError, Scenario, load_scenario, parse_scenario
from .noninterference import BlockCheck, BlockScenario, check_scenario, run_blocks
from .pipeline import (
    EXIT_CONFIG, EXIT_INVARIANT, EXIT_OK, EXIT_PRECONDITION, InvariantBreach, PreconditionFailure,
    RunResult, Validation, bench_speedup, build_network, build_topology, execute, run_scenario,
    run_validation, sweep_recall_vs_futures, sweep_recall_vs_group,
)
from .validation import ScoringError, ValidationScore, score_report

__all__ = [
    "BlockCheck", "BlockScenario", "ConfigError", "EXIT_CONFIG", "EXIT_INVARIANT", "EXIT_OK",
    "EXIT_PRECONDITION", "InvariantBreach", "PreconditionFailure", "RunResult", "SEED_ENV", "Scenario",
    "ScoringError", "Validation", "ValidationScore", "bench_speedup", "build_network", "build_topology",
    "check_scenario", "default_prices", "execute", "inject_background", "load_scenario", "parse_scenario",
    "run_blocks", "run_scenario", "run_validation", "score_report", "sweep_recall_vs_futures",
    "sweep_recall_vs_group", "uniform_prices",
]
