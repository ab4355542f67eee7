"""Exact global-EDF schedulability test for asynchronous periodic task systems."""

from .analysis import (
    Configuration,
    DeadlineMiss,
    Schedulable,
    config_dominates,
    configuration_at,
    exact_test,
    leung_test,
    predictability_probe,
    synchronous_test,
)
from .engine import ExecutionModel, Policy, ScheduleTrace, simulate
from .model import JobId, PeriodicTask, TaskSystem, validate

__all__ = [
    "Configuration",
    "DeadlineMiss",
    "ExecutionModel",
    "JobId",
    "PeriodicTask",
    "Policy",
    "Schedulable",
    "ScheduleTrace",
    "TaskSystem",
    "config_dominates",
    "configuration_at",
    "exact_test",
    "leung_test",
    "predictability_probe",
    "simulate",
    "synchronous_test",
    "validate",
]
