"""
Models package - Configuration, experiment results and reports.
"""
from .results import (
    Command,
    ModelKind,
    XiPreset,
    Scheme,
    ExperimentStatus,
    ConditionReport,
    IdentityCheck,
    SuiteReport,
    TrajectorySummary,
    ExperimentError,
    ExperimentResult,
    BatchExperimentResult,
)
from .config import (
    Settings,
    EnvironmentSettings,
    ExperimentConfig,
    parse_complex,
    format_complex,
)

__all__ = [
    # Enums
    "Command",
    "ModelKind",
    "XiPreset",
    "Scheme",
    "ExperimentStatus",
    # Reports
    "ConditionReport",
    "IdentityCheck",
    "SuiteReport",
    "TrajectorySummary",
    "ExperimentError",
    "ExperimentResult",
    "BatchExperimentResult",
    # Configuration
    "Settings",
    "EnvironmentSettings",
    "ExperimentConfig",
    "parse_complex",
    "format_complex",
]
