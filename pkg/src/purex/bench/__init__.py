"""Experiment harness: configs, seeded replications, reports, sweeps and check suites."""

from purex.bench.config import ExperimentConfig, load, loads
from purex.bench.report import Report, build
from purex.bench.runner import replication_seed, run
from purex.bench.sweep import SweepResult, parse_vary

__all__ = [
    "ExperimentConfig",
    "Report",
    "SweepResult",
    "build",
    "load",
    "loads",
    "parse_vary",
    "replication_seed",
    "run",
]
