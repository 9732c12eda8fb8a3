from fwmav.harness.config import ConfigError, ScenarioConfig, read_config, write_config
from fwmav.harness.logio import LogRecord, read_log, write_log
from fwmav.harness.metrics import MetricsSummary, compute_metrics
from fwmav.harness.runner import run_scenario, simulate
from fwmav.harness.scenarios import default_config

__all__ = [
    "ConfigError", "LogRecord", "MetricsSummary", "ScenarioConfig", "compute_metrics",
    "default_config", "read_config", "read_log", "run_scenario", "simulate", "write_config",
    "write_log",
]
