"""
Configuration models and loaders.
"""
import re
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional

import tomli
from loguru import logger
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator
from pydantic_settings import BaseSettings

from core.errors import ConfigError, DomainError
from models.results import Command, ModelKind, Scheme, XiPreset


DEFAULT_LAMBDAS = [0.3 + 0j, 0.7j, -0.5 + 0.2j]

DEFORMED_MODELS = (ModelKind.BIYB_SU2, ModelKind.BIYB_SU3, ModelKind.YB_CPN)
PCM_TYPE_MODELS = (ModelKind.PENDULUM, ModelKind.PCM, ModelKind.CPN)
CPN_MODELS = (ModelKind.CPN, ModelKind.YB_CPN)


class NumericsConfig(BaseModel):
    """Tolerances"""
    structural_tol: float = Field(1e-12, gt=0)
    identity_tol: float = Field(1e-10, gt=0)
    finite_difference_tol: float = Field(1e-6, gt=0)
    closed_form_tol: float = Field(1e-9, gt=0)
    drift_tol: float = Field(1e-8, gt=0)


class IntegrationConfig(BaseModel):
    """Time stepping defaults"""
    scheme: Scheme = Scheme.RK4
    dt: float = Field(1e-3, gt=0)
    t_end: float = Field(10.0, gt=0)
    rtol: float = Field(1e-10, gt=0)
    atol: float = Field(1e-12, gt=0)
    renormalize_threshold: float = Field(1e-8, gt=0)
    record_every: int = Field(1, ge=1)


class SamplingConfig(BaseModel):
    """Random draws"""
    samples: int = Field(200, ge=1)
    seed: int = 0
    lambdas: List[str] = Field(default_factory=lambda: ["0.3", "0.7i", "-0.5+0.2i"])


class ReportingConfig(BaseModel):
    """Report files"""
    float_digits: int = Field(17, ge=1, le=17)
    output_dir: str = "./output"


class BatchConfig(BaseModel):
    """Batch runner"""
    max_concurrent_experiments: int = Field(2, ge=1, le=16)


class Settings(BaseModel):
    """Complete application settings"""
    numerics: NumericsConfig = Field(default_factory=NumericsConfig)
    integration: IntegrationConfig = Field(default_factory=IntegrationConfig)
    sampling: SamplingConfig = Field(default_factory=SamplingConfig)
    reporting: ReportingConfig = Field(default_factory=ReportingConfig)
    batch: BatchConfig = Field(default_factory=BatchConfig)

    @classmethod
    def load_from_toml(cls, config_path: Path) -> "Settings":
        """Load settings from TOML file"""
        try:
            with open(config_path, "rb") as f:
                data = tomli.load(f)
            return cls(**data)
        except Exception as e:
            logger.warning(f"Failed to load config from {config_path}: {e}. Using defaults.")
            return cls()


class EnvironmentSettings(BaseSettings):
    """Environment variables"""
    log_level: str = "INFO"
    output_dir: str = "./output"
    emodel_seed: Optional[int] = None

    class Config:
        env_file = ".env"
        env_file_encoding = "utf-8"


# ---------------------------------------------------------------------------
# Complex numbers as "a+bi"
# ---------------------------------------------------------------------------

_NUMBER = r"[+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?"
_COMPLEX = re.compile(
    rf"^(?:(?P<re>{_NUMBER})(?P<im>[+-](?:\d+\.?\d*|\.\d+)?(?:[eE][+-]?\d+)?)i"
    rf"|(?P<only_im>{_NUMBER}|[+-]?)i"
    rf"|(?P<only_re>{_NUMBER}))$"
)


def parse_complex(text: str, field: str = "lambdas") -> complex:
    """Parse 'a', 'bi' or 'a+bi' (also 'i', '-i', exponents)"""
    cleaned = text.strip().replace(" ", "").replace("j", "i")
    match = _COMPLEX.match(cleaned)
    if not match:
        raise ConfigError(field, f"cannot parse {text!r} as a complex number")

    def coefficient(part: str) -> float:
        return float(part + "1") if part in ("", "+", "-") else float(part)

    if match.group("only_re") is not None:
        return complex(float(match.group("only_re")), 0.0)
    if match.group("only_im") is not None:
        return complex(0.0, coefficient(match.group("only_im")))
    return complex(float(match.group("re")), coefficient(match.group("im")))


def format_complex(value: complex) -> str:
    """'a+bi' rendering with round-trip float precision"""
    value = complex(value)
    if value.imag == 0:
        return repr(value.real)
    if value.real == 0:
        return f"{value.imag!r}i"
    sign = "+" if value.imag >= 0 else "-"
    return f"{value.real!r}{sign}{abs(value.imag)!r}i"


# ---------------------------------------------------------------------------
# Time grid
# ---------------------------------------------------------------------------

STEP_TOLERANCE = 1e-9


def step_count(t_end: float, dt: float) -> int:
    """Number of fixed steps dt that land exactly on t_end"""
    if dt <= 0 or t_end <= 0:
        raise DomainError(f"dt and t_end must be positive (dt={dt}, t_end={t_end})")
    n_steps = int(round(t_end / dt))
    if n_steps < 1:
        raise DomainError(f"t_end={t_end} is shorter than one step dt={dt}")
    if abs(n_steps * dt - t_end) > STEP_TOLERANCE * max(1.0, t_end):
        raise DomainError(f"t_end={t_end} is not a whole number of steps dt={dt}")
    return n_steps


# ---------------------------------------------------------------------------
# Experiment configuration
# ---------------------------------------------------------------------------

_SCALAR_KEYS = ("name", "command", "model", "N", "eta", "mu", "xi_preset", "t_end", "dt", "scheme",
                "samples", "seed", "record_every", "rtol", "atol", "output_dir")


class ExperimentConfig(BaseModel):
    """One experiment: a command, a model and its numerical parameters"""
    model_config = ConfigDict(validate_assignment=False, extra="forbid")

    name: str = "experiment"
    command: Command
    model: ModelKind
    N: int = Field(2, ge=1)
    eta: float = 0.5
    mu: float = 0.3
    xi_preset: Optional[XiPreset] = None
    t_end: float = Field(10.0, gt=0)
    dt: float = Field(1e-3, gt=0)
    scheme: Scheme = Scheme.RK4
    lambdas: List[complex] = Field(default_factory=lambda: list(DEFAULT_LAMBDAS))
    samples: int = Field(200, ge=1)
    seed: Optional[int] = None
    record_every: int = Field(1, ge=1)
    rtol: float = Field(1e-10, gt=0)
    atol: float = Field(1e-12, gt=0)
    tolerances: Dict[str, float] = Field(default_factory=dict)
    output_dir: Optional[str] = None

    @field_validator("lambdas", mode="before")
    @classmethod
    def _parse_lambdas(cls, value: Any) -> Any:
        if isinstance(value, str):
            return [parse_complex(part) for part in value.split(",") if part.strip()]
        return [parse_complex(v) if isinstance(v, str) else v for v in value]

    @field_validator("tolerances")
    @classmethod
    def _positive_tolerances(cls, value: Dict[str, float]) -> Dict[str, float]:
        for key, tol in value.items():
            if not tol > 0:
                raise ConfigError(f"tolerance.{key}", "must be positive")
        return value

    @model_validator(mode="after")
    def _check_model(self) -> "ExperimentConfig":
        if self.model in DEFORMED_MODELS:
            if not self.eta > 0:
                raise ConfigError("eta", f"must be positive for {self.model.value}, got {self.eta}")
            if self.mu < 0:
                raise ConfigError("mu", f"must be non-negative, got {self.mu}")
        if self.model in CPN_MODELS and self.xi_preset not in (None, XiPreset.CPN_BLOCK):
            raise ConfigError("xi_preset", f"{self.model.value} requires {XiPreset.CPN_BLOCK.value}")
        if self.model in (ModelKind.PCM,) and self.N < 2:
            raise ConfigError("N", "the principal chiral model needs N >= 2")
        try:
            step_count(self.t_end, self.dt)
        except DomainError as e:
            raise ConfigError("t_end", str(e)) from e
        if self.model in PCM_TYPE_MODELS:
            for lam in self.lambdas:
                if abs(1 - lam ** 2) < 1e-12:
                    raise ConfigError("lambdas", f"{format_complex(lam)} is a pole of 1/(1-lambda^2)")
        return self

    # -- construction -------------------------------------------------------

    @classmethod
    def build(cls, data: Mapping[str, Any]) -> "ExperimentConfig":
        """Validate a dict, reporting the offending field as ConfigError"""
        try:
            return cls(**data)
        except ValidationError as e:
            error = e.errors()[0]
            original = (error.get("ctx") or {}).get("error")
            if isinstance(original, ConfigError):
                raise original from e
            field = ".".join(str(part) for part in error.get("loc", ())) or "config"
            raise ConfigError(field, error.get("msg", str(e))) from e

    @staticmethod
    def parse_pairs(text: str) -> Dict[str, Any]:
        """
        Raw values of the flat 'key = value' format.

        Lines starting with '#' are comments; lambdas are comma separated
        'a+bi' values; tolerances use 'tolerance.<name> = value'.
        """
        data: Dict[str, Any] = {}
        tolerances: Dict[str, float] = {}
        for number, raw in enumerate(text.splitlines(), start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"line {number}", f"expected 'key = value', got {raw.strip()!r}")
            key, value = (part.strip() for part in line.split("=", 1))
            if key.startswith("tolerance."):
                try:
                    tolerances[key[len("tolerance."):]] = float(value)
                except ValueError:
                    raise ConfigError(key, f"not a number: {value!r}")
            elif key == "lambdas":
                data[key] = value
            elif key in _SCALAR_KEYS:
                data[key] = value
            else:
                raise ConfigError(key, "unknown key")
        if tolerances:
            data["tolerances"] = tolerances
        return data

    @classmethod
    def parse(cls, text: str, overrides: Optional[Mapping[str, Any]] = None) -> "ExperimentConfig":
        """Parse and validate; non-None overrides win over the text"""
        data = cls.parse_pairs(text)
        if overrides:
            data.update({k: v for k, v in overrides.items() if v is not None})
        return cls.build(data)

    @classmethod
    def load(cls, path: Path, overrides: Optional[Mapping[str, Any]] = None) -> "ExperimentConfig":
        try:
            text = Path(path).read_text(encoding="utf-8")
        except OSError as e:
            raise ConfigError("config", f"cannot read {path}: {e}")
        return cls.parse(text, overrides)

    def merged(self, overrides: Mapping[str, Any]) -> "ExperimentConfig":
        """Copy with non-None overrides applied (command-line flags win)"""
        data = self.model_dump()
        data.update({k: v for k, v in overrides.items() if v is not None})
        return ExperimentConfig.build(data)

    def serialize(self) -> str:
        """Flat text that parses back to an equal config"""
        lines = []
        for key in _SCALAR_KEYS:
            value = getattr(self, key)
            if value is None:
                continue
            if hasattr(value, "value"):
                value = value.value
            elif isinstance(value, float):
                value = repr(value)
            lines.append(f"{key} = {value}")
        lines.append("lambdas = " + ", ".join(format_complex(lam) for lam in self.lambdas))
        for key in sorted(self.tolerances):
            lines.append(f"tolerance.{key} = {self.tolerances[key]!r}")
        return "\n".join(lines) + "\n"

    def resolve_seed(self, env: Optional[EnvironmentSettings] = None, settings: Optional[Settings] = None) -> int:
        """Config (already merged with CLI flags), then EMODEL_SEED, then settings"""
        if self.seed is not None:
            return self.seed
        if env is not None and env.emodel_seed is not None:
            return env.emodel_seed
        return settings.sampling.seed if settings is not None else 0

    def tolerance(self, name: str, default: float) -> float:
        return self.tolerances.get(name, default)
