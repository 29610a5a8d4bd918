"""Experiment harness: configs, suites, reports and the command line."""

from .config import SCHEMA, ExperimentConfig, validate_config
from .runner import Report, run_experiment
from .suites import SUITES, Row

__all__ = ["SCHEMA", "SUITES", "ExperimentConfig", "Report", "Row", "run_experiment", "validate_config"]
