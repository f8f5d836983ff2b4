"""
Models for experiment results, verification reports and errors.
"""
from typing import Any, Dict, List, Optional
from datetime import datetime
from enum import Enum
from pydantic import BaseModel, ConfigDict, Field


class Command(str, Enum):
    """CLI command"""
    SIMULATE = "simulate"
    VERIFY = "verify"
    LAX_CHECK = "lax-check"
    REDUCE = "reduce"
    APPENDIX = "appendix"
    PARITY = "parity"


class ModelKind(str, Enum):
    """Catalogued models"""
    PENDULUM = "pendulum"
    PCM = "pcm"
    CPN = "cpn"
    BIYB_SU2 = "biyb-su2"
    BIYB_SU3 = "biyb-su3"
    YB_CPN = "yb-cpn"


class XiPreset(str, Enum):
    """Choice of the stabilized element"""
    CARTAN_REGULAR = "cartan-regular"
    CPN_BLOCK = "cpn-block"


class Scheme(str, Enum):
    """Time stepping scheme"""
    RK4 = "rk4"
    ADAPTIVE = "adaptive"


class ExperimentStatus(str, Enum):
    """Outcome of one experiment"""
    PENDING = "pending"
    PASSED = "passed"
    FAILED = "failed"
    ABORTED = "aborted"
    ERROR = "error"
    CANCELLED = "cancelled"


class ConditionReport(BaseModel):
    """Max residual of one identity over seeded random draws"""
    model_config = ConfigDict(populate_by_name=True)

    condition: str
    samples: int = Field(ge=1)
    seed: int
    max_residual: float
    threshold: float
    passed: bool = Field(alias="pass")

    @classmethod
    def evaluate(cls, condition: str, residuals: List[float], seed: int, threshold: float) -> "ConditionReport":
        worst = max(residuals) if residuals else 0.0
        return cls(condition=condition, samples=max(len(residuals), 1), seed=seed,
                   max_residual=worst, threshold=threshold, passed=bool(worst <= threshold))


class IdentityCheck(BaseModel):
    """One closed-form comparison"""
    name: str
    residual: float
    threshold: float
    passed: bool


class SuiteReport(BaseModel):
    """Bundle of identity checks for one model"""
    suite: str
    seed: Optional[int] = None
    checks: List[IdentityCheck] = Field(default_factory=list)

    def add(self, name: str, residual: float, threshold: float) -> IdentityCheck:
        """Record (or max-merge) a residual"""
        residual = float(residual)
        for i, check in enumerate(self.checks):
            if check.name == name:
                worst = max(check.residual, residual)
                self.checks[i] = IdentityCheck(name=name, residual=worst, threshold=threshold,
                                               passed=bool(worst <= threshold))
                return self.checks[i]
        check = IdentityCheck(name=name, residual=residual, threshold=threshold,
                              passed=bool(residual <= threshold))
        self.checks.append(check)
        return check

    def get(self, name: str) -> IdentityCheck:
        for check in self.checks:
            if check.name == name:
                return check
        raise KeyError(name)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def max_residual(self) -> float:
        return max((c.residual for c in self.checks), default=0.0)


class TrajectorySummary(BaseModel):
    """Drift diagnostics of one integrated trajectory"""
    model: str
    scheme: Scheme
    dt: float
    t_end: float
    samples: int
    energy_drift: float
    invariant_drift: Dict[str, float] = Field(default_factory=dict)
    lax_residual: Dict[str, float] = Field(default_factory=dict)
    max_group_drift: float = 0.0
    renormalizations: int = 0
    moment_map_residual: float = 0.0
    orbit_spectrum_drift: float = 0.0
    tolerance: float = 1e-8
    lax_tolerance: float = 1e-6

    @property
    def passed(self) -> bool:
        drifts = [self.energy_drift, self.moment_map_residual, self.orbit_spectrum_drift]
        drifts += list(self.invariant_drift.values())
        return all(d <= self.tolerance for d in drifts) and all(
            r <= self.lax_tolerance for r in self.lax_residual.values())


class ExperimentError(BaseModel):
    """Error information for a failed experiment"""
    name: str
    error_type: str
    error_message: str
    diagnostic: Dict[str, Any] = Field(default_factory=dict)
    timestamp: datetime = Field(default_factory=datetime.now)
    traceback: Optional[str] = None


class ExperimentResult(BaseModel):
    """Result of running a single experiment"""
    name: str
    command: Command
    model: ModelKind
    seed: Optional[int] = None
    status: ExperimentStatus = ExperimentStatus.PENDING
    conditions: List[ConditionReport] = Field(default_factory=list)
    suites: List[SuiteReport] = Field(default_factory=list)
    trajectory: Optional[TrajectorySummary] = None
    artifacts: List[str] = Field(default_factory=list)
    error: Optional[ExperimentError] = None
    processing_time_seconds: float = 0.0

    @property
    def passed(self) -> bool:
        ok = all(c.passed for c in self.conditions) and all(s.passed for s in self.suites)
        if self.trajectory is not None:
            ok = ok and self.trajectory.passed
        return ok and self.error is None

    def finalize_status(self) -> ExperimentStatus:
        if self.error is None:
            self.status = ExperimentStatus.PASSED if self.passed else ExperimentStatus.FAILED
        return self.status

    @property
    def exit_code(self) -> int:
        """0 pass, 2 tolerance failure, 3 numerical abort, 64 usage error"""
        if self.status == ExperimentStatus.PASSED:
            return 0
        if self.status == ExperimentStatus.FAILED:
            return 2
        if self.status == ExperimentStatus.ABORTED:
            return 3
        if self.error is not None and self.error.error_type == "ConfigError":
            return 64
        return 3

    def report_payload(self) -> Dict[str, Any]:
        """JSON-ready dict without wall-clock fields"""
        payload = self.model_dump(mode="json", by_alias=True,
                                  exclude={"processing_time_seconds": True, "artifacts": True,
                                           "error": {"timestamp", "traceback"}})
        payload["passed"] = self.passed
        return payload


class BatchExperimentResult(BaseModel):
    """Result of running a batch of experiments"""
    total_experiments: int
    passed: int = 0
    failed: int = 0
    aborted: int = 0
    cancelled: int = 0

    results: List[ExperimentResult] = Field(default_factory=list)
    errors: List[ExperimentError] = Field(default_factory=list)

    start_time: datetime = Field(default_factory=datetime.now)
    end_time: Optional[datetime] = None

    @property
    def total_time_seconds(self) -> float:
        """Calculate total processing time"""
        if self.end_time:
            return (self.end_time - self.start_time).total_seconds()
        return 0.0

    @property
    def success_rate(self) -> float:
        """Calculate success rate as percentage"""
        if self.total_experiments == 0:
            return 0.0
        return (self.passed / self.total_experiments) * 100

    @property
    def exit_code(self) -> int:
        """Worst exit code over the batch"""
        codes = [r.exit_code for r in self.results]
        if not codes:
            return 0
        if 64 in codes:
            return 64
        if 3 in codes:
            return 3
        return max(codes)

    def add_result(self, result: ExperimentResult):
        """Add an experiment result and update counters"""
        self.results.append(result)

        if result.status == ExperimentStatus.PASSED:
            self.passed += 1
        elif result.status == ExperimentStatus.FAILED:
            self.failed += 1
        elif result.status in (ExperimentStatus.ABORTED, ExperimentStatus.ERROR):
            self.aborted += 1
            if result.error:
                self.errors.append(result.error)
        elif result.status == ExperimentStatus.CANCELLED:
            self.cancelled += 1

    def finalize(self):
        """Mark batch as complete"""
        self.end_time = datetime.now()
