from .config import ConfigError, ScenarioConfig, load_config
from .report import emit_report
from .runner import InvariantError, RunReport, run_scenario
from .stats import ModelViolationError, chi_square

__all__ = [
    "ConfigError",
    "InvariantError",
    "ModelViolationError",
    "RunReport",
    "ScenarioConfig",
    "chi_square",
    "emit_report",
    "load_config",
    "run_scenario",
]
