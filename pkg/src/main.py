"""
Main entry point for the emodel-lab command line.
"""
import argparse
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional

from loguru import logger

# Add src to path
sys.path.insert(0, str(Path(__file__).parent))

from core.errors import ConfigError
from models import Command, EnvironmentSettings, ExperimentConfig, ModelKind, Scheme, Settings, XiPreset
from core.orchestrator import ExperimentOrchestrator
from utils import FileHandler


PROJECT_ROOT = Path(__file__).parent.parent
EXIT_USAGE = 64

# Models implied by a command when --model is omitted
DEFAULT_MODELS = {
    Command.APPENDIX: ModelKind.BIYB_SU3,
    Command.REDUCE: ModelKind.CPN,
}


def setup_logging(log_level: str = "INFO", logs_dir: Optional[Path] = None):
    """Configure logging"""
    logger.remove()  # Remove default handler
    logger.add(
        sys.stderr,
        level=log_level,
        format="<green>{time:YYYY-MM-DD HH:mm:ss}</green> | <level>{level: <8}</level> | <cyan>{name}</cyan>:<cyan>{function}</cyan> - <level>{message}</level>"
    )

    logs_dir = logs_dir or PROJECT_ROOT / "logs"
    logs_dir.mkdir(exist_ok=True)

    logger.add(
        str(logs_dir / "emodel_{time:YYYY-MM-DD}.log"),
        rotation="1 day",
        retention="7 days",
        level=log_level,
        format="{time:YYYY-MM-DD HH:mm:ss} | {level: <8} | {name}:{function} - {message}"
    )


class UsageParser(argparse.ArgumentParser):
    """ArgumentParser reporting usage errors as ConfigError (exit 64, not 2)"""

    def error(self, message: str):
        raise ConfigError("arguments", message)


def build_parser() -> argparse.ArgumentParser:
    parser = UsageParser(prog="emodel", description="Point particle E-models: simulation and verification")
    parser.add_argument("command", nargs="?", choices=[c.value for c in Command],
                        help="Experiment to run (omit with --batch)")
    parser.add_argument("--config", type=Path, help="Experiment file (key = value)")
    parser.add_argument("--batch", type=Path, help="File listing experiment files, run concurrently")
    parser.add_argument("--name", help="Experiment name")
    parser.add_argument("--model", choices=[m.value for m in ModelKind])
    parser.add_argument("--N", type=int, dest="N", help="SU(N) size, or the CP^N dimension for cpn and yb-cpn")
    parser.add_argument("--eta", type=float)
    parser.add_argument("--mu", type=float)
    parser.add_argument("--xi-preset", dest="xi_preset", choices=[x.value for x in XiPreset])
    parser.add_argument("--t-end", dest="t_end", type=float)
    parser.add_argument("--dt", type=float)
    parser.add_argument("--scheme", choices=[s.value for s in Scheme])
    parser.add_argument("--lambdas", help="Comma separated spectral parameters, e.g. '0.3, 0.7i, -0.5+0.2i'")
    parser.add_argument("--samples", type=int)
    parser.add_argument("--seed", type=int)
    parser.add_argument("--record-every", dest="record_every", type=int)
    parser.add_argument("--rtol", type=float)
    parser.add_argument("--atol", type=float)
    parser.add_argument("--tolerance", action="append", default=[], metavar="NAME=VALUE",
                        help="Override a tolerance (structural, identity, finite_difference, closed_form, drift)")
    parser.add_argument("--output", type=Path, help="Output directory")
    parser.add_argument("--log-level", dest="log_level", help="Overrides LOG_LEVEL")
    return parser


def _tolerances(pairs: List[str]) -> Dict[str, float]:
    tolerances = {}
    for pair in pairs:
        name, sep, value = pair.partition("=")
        if not sep:
            raise ConfigError("tolerance", f"expected NAME=VALUE, got {pair!r}")
        try:
            tolerances[name.strip()] = float(value)
        except ValueError:
            raise ConfigError(f"tolerance.{name.strip()}", f"not a number: {value!r}")
    return tolerances


def cli_overrides(args: argparse.Namespace) -> Dict[str, Any]:
    """Flags given on the command line (None entries are dropped when merging)"""
    overrides: Dict[str, Any] = {
        key: getattr(args, key)
        for key in ("name", "model", "N", "eta", "mu", "xi_preset", "t_end", "dt", "scheme",
                    "lambdas", "samples", "seed", "record_every", "rtol", "atol")
    }
    if args.command:
        overrides["command"] = args.command
    if args.output:
        overrides["output_dir"] = str(args.output)
    return overrides


def settings_defaults(settings: Settings) -> Dict[str, Any]:
    """Experiment defaults taken from settings.toml"""
    integration, sampling = settings.integration, settings.sampling
    return {
        "t_end": integration.t_end,
        "dt": integration.dt,
        "scheme": integration.scheme,
        "rtol": integration.rtol,
        "atol": integration.atol,
        "record_every": integration.record_every,
        "samples": sampling.samples,
        "lambdas": ", ".join(sampling.lambdas),
    }


def build_config(args: argparse.Namespace, settings: Settings, config_path: Optional[Path] = None) -> ExperimentConfig:
    """
    Settings defaults, then the experiment file, then command-line flags.

    Raises:
        ConfigError: for a missing command or model, or any invalid value
    """
    data = settings_defaults(settings)
    if config_path is not None:
        try:
            text = Path(config_path).read_text(encoding="utf-8")
        except OSError as e:
            raise ConfigError("config", f"cannot read {config_path}: {e}")
        data.update(ExperimentConfig.parse_pairs(text))
    overrides = cli_overrides(args)
    data.update({k: v for k, v in overrides.items() if v is not None})

    tolerances = dict(data.get("tolerances", {}))
    tolerances.update(_tolerances(args.tolerance))
    if tolerances:
        data["tolerances"] = tolerances

    if "command" not in data:
        raise ConfigError("command", "no command given")
    try:
        command = Command(data["command"])
    except ValueError:
        raise ConfigError("command", f"unknown command {data['command']!r}")
    if "model" not in data:
        if command not in DEFAULT_MODELS:
            raise ConfigError("model", f"--model is required for {command.value}")
        data["model"] = DEFAULT_MODELS[command]
    try:
        model = ModelKind(data["model"])
    except ValueError:
        raise ConfigError("model", f"unknown model {data['model']!r}")
    data.setdefault("name", f"{command.value}-{model.value}")
    return ExperimentConfig.build(data)


def main(argv: Optional[List[str]] = None) -> int:
    """Run the command line; returns the exit code"""
    config_dir = PROJECT_ROOT / "config"
    settings = Settings.load_from_toml(config_dir / "settings.toml")
    env_settings = EnvironmentSettings()

    try:
        args = build_parser().parse_args(argv)
    except ConfigError as e:
        setup_logging(env_settings.log_level)
        logger.error(f"Usage error: {e}")
        return EXIT_USAGE

    setup_logging(args.log_level or env_settings.log_level)
    logger.info("Starting emodel-lab")

    output_root = Path(args.output or env_settings.output_dir)
    output_root.mkdir(parents=True, exist_ok=True)
    orchestrator = ExperimentOrchestrator(settings=settings, env=env_settings, output_root=output_root)

    try:
        if args.batch:
            configs = [build_config(args, settings, path) for path in FileHandler.read_batch(args.batch)]
            for config in configs:
                config.output_dir = None
            batch = orchestrator.run_batch(configs)
            return batch.exit_code

        if not args.command:
            raise ConfigError("command", "give a command or --batch FILE")
        config = build_config(args, settings, args.config)
        return orchestrator.run(config).exit_code

    except ConfigError as e:
        logger.error(f"Invalid configuration: {e}")
        return EXIT_USAGE


if __name__ == "__main__":
    try:
        sys.exit(main())
    except Exception as e:
        logger.exception(f"Application error: {e}")
        sys.exit(3)
