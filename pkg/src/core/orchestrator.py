"""
Experiment orchestrator - runs configured experiments and batches of them.
"""
import time
import threading
import traceback
from concurrent.futures import ThreadPoolExecutor, as_completed
from pathlib import Path
from typing import Callable, Dict, List, Optional

from loguru import logger

from core.appendix import biyb_su3_appendix
from core.biyb import biyb_su2_suite, biyb_suite, yb_cpn_suite
from core.catalogue import ModelPreset, build_model
from core.cpn import cpn_suite
from core.dynamics import integrate, lambda_label
from core.errors import ConfigError, EModelError, NumericalAbortError, SingularOperatorError
from core.integrability import lax_residual, rmatrix_identity_report, verify_conditions
from core.pendulum import pcm_second_order_residual, pcm_suite, pendulum_suite
from core.reduction import reduction_suite
from models import (
    BatchExperimentResult,
    Command,
    ConditionReport,
    EnvironmentSettings,
    ExperimentConfig,
    ExperimentError,
    ExperimentResult,
    ExperimentStatus,
    ModelKind,
    Settings,
    SuiteReport,
    TrajectorySummary,
)
from utils import FileHandler, ReportWriter


# Commands tied to one catalogue entry
COMMAND_MODELS = {
    Command.REDUCE: (ModelKind.CPN,),
    Command.APPENDIX: (ModelKind.BIYB_SU3,),
}

TSTAR_MODELS = (ModelKind.PENDULUM, ModelKind.PCM, ModelKind.CPN)


class ExperimentOrchestrator:
    """
    Runs experiments and writes their reports.
    Manages the thread pool and cancellation of batches.
    """

    def __init__(self,
                 settings: Optional[Settings] = None,
                 env: Optional[EnvironmentSettings] = None,
                 output_root: Optional[Path] = None,
                 max_workers: Optional[int] = None,
                 progress_callback: Optional[Callable[[ExperimentResult], None]] = None):
        """
        Initialize orchestrator.

        Args:
            settings: Application settings (defaults when omitted)
            env: Environment settings (EMODEL_SEED, output directory)
            output_root: Directory receiving reports; overrides env.output_dir
            max_workers: Concurrent experiments in a batch
            progress_callback: Called with every finished experiment
        """
        self.settings = settings or Settings()
        self.env = env or EnvironmentSettings()
        self.output_root = Path(output_root or self.env.output_dir or self.settings.reporting.output_dir)
        self.max_workers = max_workers or self.settings.batch.max_concurrent_experiments
        self.progress_callback = progress_callback

        self._cancel_flag = threading.Event()
        self._handlers: Dict[Command, Callable[[ExperimentConfig, int, ExperimentResult, ReportWriter], None]] = {
            Command.SIMULATE: self._simulate,
            Command.VERIFY: self._verify,
            Command.LAX_CHECK: self._lax_check,
            Command.REDUCE: self._reduce,
            Command.APPENDIX: self._appendix,
            Command.PARITY: self._parity,
        }

    # -- tolerances ----------------------------------------------------------

    def _tol(self, config: ExperimentConfig, name: str) -> float:
        numerics = self.settings.numerics
        defaults = {
            "structural": numerics.structural_tol,
            "identity": numerics.identity_tol,
            "finite_difference": numerics.finite_difference_tol,
            "closed_form": numerics.closed_form_tol,
            "drift": numerics.drift_tol,
        }
        return config.tolerance(name, defaults[name])

    # -- single experiment ---------------------------------------------------

    def run(self, config: ExperimentConfig, output_dir: Optional[Path] = None) -> ExperimentResult:
        """
        Run one experiment and write report.json (and trajectory.csv for simulate).

        Failures never escape: they are logged and recorded in the result,
        whose exit_code follows the 0 / 2 / 3 / 64 contract.
        """
        start = time.perf_counter()
        seed = config.resolve_seed(self.env, self.settings)
        out_dir = Path(output_dir or config.output_dir or self.output_root)
        writer = ReportWriter(out_dir, self.settings.reporting.float_digits)
        result = ExperimentResult(name=config.name, command=config.command, model=config.model, seed=seed)

        logger.info(f"Starting {config.command.value} on {config.model.value} "
                    f"(name={config.name}, N={config.N}, seed={seed})")
        try:
            allowed = COMMAND_MODELS.get(config.command)
            if allowed and config.model not in allowed:
                raise ConfigError("model", f"{config.command.value} applies to "
                                           f"{', '.join(m.value for m in allowed)}, got {config.model.value}")
            self._handlers[config.command](config, seed, result, writer)
            self._check_reports(result)
            result.finalize_status()

        except ConfigError as e:
            logger.error(f"Invalid experiment {config.name}: {e}")
            result.status = ExperimentStatus.ERROR
            result.error = self._error(config.name, e)

        except (NumericalAbortError, SingularOperatorError) as e:
            logger.error(f"Numerical abort in {config.name}: {e}")
            result.status = ExperimentStatus.ABORTED
            result.error = self._error(config.name, e)

        except EModelError as e:
            logger.error(f"Experiment {config.name} failed: {e}")
            result.status = ExperimentStatus.ABORTED
            result.error = self._error(config.name, e)

        except Exception as e:
            logger.exception(f"Unexpected error in {config.name}: {e}")
            result.status = ExperimentStatus.ERROR
            result.error = self._error(config.name, e, with_traceback=True)

        result.processing_time_seconds = time.perf_counter() - start
        try:
            payload = result.report_payload()
        except Exception as e:
            logger.exception(f"Unreportable result in {config.name}: {e}")
            result.conditions, result.suites, result.trajectory = [], [], None
            result.status = ExperimentStatus.ABORTED
            result.error = self._error(config.name, e, with_traceback=True)
            payload = result.report_payload()
        try:
            result.artifacts.append(str(writer.write_json("report", payload)))
        except OSError as e:
            logger.error(f"Could not write report for {config.name}: {e}")

        logger.info(f"Finished {config.name}: {result.status.value} "
                    f"(exit {result.exit_code}, {result.processing_time_seconds:.2f}s)")
        return result

    @staticmethod
    def _check_reports(result: ExperimentResult) -> None:
        """Drop anything a handler recorded that is not a report, failing the experiment"""
        malformed = [type(s).__name__ for s in result.suites if not isinstance(s, SuiteReport)]
        malformed += [type(c).__name__ for c in result.conditions if not isinstance(c, ConditionReport)]
        if malformed:
            result.suites = [s for s in result.suites if isinstance(s, SuiteReport)]
            result.conditions = [c for c in result.conditions if isinstance(c, ConditionReport)]
            raise EModelError(f"{result.command.value} produced no report ({', '.join(malformed)})")

    @staticmethod
    def _error(name: str, e: Exception, with_traceback: bool = False) -> ExperimentError:
        diagnostic = dict(getattr(e, "diagnostic", None) or {})
        for attr in ("field", "condition_number", "denominator", "norm"):
            value = getattr(e, attr, None)
            if value is not None:
                diagnostic[attr] = value if isinstance(value, (int, float, str)) else str(value)
        return ExperimentError(
            name=name,
            error_type=type(e).__name__,
            error_message=str(e),
            diagnostic=diagnostic,
            traceback=traceback.format_exc() if with_traceback else None,
        )

    def _preset(self, config: ExperimentConfig, seed: int) -> ModelPreset:
        return build_model(config.model, N=config.N, eta=config.eta, mu=config.mu,
                           xi_preset=config.xi_preset, seed=seed)

    # -- commands ------------------------------------------------------------

    def _integrate(self, config: ExperimentConfig, preset: ModelPreset, track_current: bool = True):
        return integrate(preset.spec, preset.l0, config.t_end, config.dt,
                         scheme=config.scheme,
                         lambdas=config.lambdas,
                         spectral=preset.spectral,
                         rtol=config.rtol,
                         atol=config.atol,
                         renormalize_threshold=self.settings.integration.renormalize_threshold,
                         record_every=config.record_every,
                         track_current=track_current)

    def _simulate(self, config: ExperimentConfig, seed: int, result: ExperimentResult, writer: ReportWriter):
        """Integrate, summarize the drifts and write the trajectory table"""
        preset = self._preset(config, seed)
        traj = self._integrate(config, preset)

        invariant_drift = {}
        lax = {}
        for lam in config.lambdas:
            label = lambda_label(lam)
            for power in (2, 3):
                invariant_drift[f"trL{power}@{label}"] = traj.invariant_drift(lam, power)
            lax[label] = lax_residual(traj, lam, preset.spectral, preset.spec).residual

        result.trajectory = TrajectorySummary(
            model=config.model.value,
            scheme=config.scheme,
            dt=config.dt,
            t_end=config.t_end,
            samples=len(traj),
            energy_drift=traj.energy_drift,
            invariant_drift=invariant_drift,
            lax_residual=lax,
            max_group_drift=traj.max_drift,
            renormalizations=traj.renormalizations,
            moment_map_residual=traj.moment_map_residual(),
            orbit_spectrum_drift=traj.orbit_spectrum_drift(preset.spec),
            tolerance=self._tol(config, "drift"),
            lax_tolerance=self._tol(config, "finite_difference"),
        )
        logger.info(f"{config.name}: energy drift {traj.energy_drift:.3e}, "
                    f"max Lax residual {max(lax.values(), default=0.0):.3e}")
        result.artifacts.append(str(writer.write_trajectory_csv(preset.spec, traj, config.lambdas)))

    def _verify(self, config: ExperimentConfig, seed: int, result: ExperimentResult, writer: ReportWriter):
        """The five sufficient conditions, plus adjointness and the r-matrix identity"""
        preset = self._preset(config, seed)
        threshold = self._tol(config, "identity")
        reports = verify_conditions(preset.spec, preset.spectral, config.samples, seed, threshold)

        consistency = SuiteReport(suite="consistency", seed=seed)
        for report in reports:
            if report.condition == "adjointness":
                consistency.add("adjointness", report.max_residual, threshold)
            else:
                result.conditions.append(report)
        rmatrix = rmatrix_identity_report(preset.spec, preset.spectral, config.samples, seed, threshold)
        consistency.add(rmatrix.condition, rmatrix.max_residual, threshold)
        result.suites.append(consistency)

    def _lax_check(self, config: ExperimentConfig, seed: int, result: ExperimentResult, writer: ReportWriter):
        """Lax equation and isospectrality along a trajectory"""
        preset = self._preset(config, seed)
        traj = self._integrate(config, preset, track_current=False)
        fd_tol = self._tol(config, "finite_difference")
        drift_tol = self._tol(config, "drift")

        suite = SuiteReport(suite=f"lax-{config.model.value}", seed=seed)
        suite.add("energy-drift", traj.energy_drift, drift_tol)
        for lam in config.lambdas:
            label = lambda_label(lam)
            residual = lax_residual(traj, lam, preset.spectral, preset.spec)
            suite.add(f"lax-residual@{label}", residual.residual, fd_tol)
            suite.add(f"isospectral-drift@{label}", residual.isospectral_drift, drift_tol)

        if config.model in TSTAR_MODELS and len(traj) >= 9:
            zeta = preset.spec.xi_matrix
            bianchi, eom = pcm_second_order_residual([p.k for p in traj.points], traj.sample_step, zeta)
            suite.add("bianchi-identity", bianchi, fd_tol)
            suite.add("second-order-eom", eom, fd_tol)
        result.suites.append(suite)

    def _reduce(self, config: ExperimentConfig, seed: int, result: ExperimentResult, writer: ReportWriter):
        result.suites.append(reduction_suite(N=config.N, samples=config.samples, seed=seed,
                                             lambdas=list(config.lambdas), t_end=config.t_end, dt=config.dt))

    def _appendix(self, config: ExperimentConfig, seed: int, result: ExperimentResult, writer: ReportWriter):
        result.suites.append(biyb_su3_appendix(config.eta, config.mu, samples=config.samples, seed=seed,
                                               table_tol=self._tol(config, "identity"),
                                               action_tol=self._tol(config, "closed_form")))

    def _parity(self, config: ExperimentConfig, seed: int, result: ExperimentResult, writer: ReportWriter):
        """Closed-form catalogue entries against the general machinery"""
        closed_form = self._tol(config, "closed_form")
        model = config.model
        if model == ModelKind.PENDULUM:
            suites = [pendulum_suite(t_end=config.t_end, oracle_t_end=min(5.0, config.t_end), dt=config.dt,
                                     seed=seed, energy_tol=self._tol(config, "drift"),
                                     oracle_tol=self._tol(config, "finite_difference"))]
        elif model == ModelKind.PCM:
            suites = [pcm_suite(N=config.N, samples=config.samples, seed=seed)]
        elif model == ModelKind.CPN:
            suites = [cpn_suite(N=config.N, samples=config.samples, seed=seed)]
        elif model == ModelKind.BIYB_SU2:
            suites = [biyb_suite(2, config.eta, config.mu, samples=config.samples, seed=seed, threshold=closed_form),
                      biyb_su2_suite(config.eta, config.mu, samples=config.samples, seed=seed)]
        elif model == ModelKind.BIYB_SU3:
            suites = [biyb_suite(3, config.eta, config.mu, samples=config.samples, seed=seed, threshold=closed_form)]
        else:
            suites = [yb_cpn_suite(config.N, config.eta, samples=config.samples, seed=seed, threshold=closed_form)]
        result.suites.extend(suites)

    # -- batches -------------------------------------------------------------

    def run_batch(self, configs: List[ExperimentConfig]) -> BatchExperimentResult:
        """
        Run experiments concurrently, each into <output_root>/<name>, and write
        batch_summary.json.
        """
        self._cancel_flag.clear()
        batch_result = BatchExperimentResult(total_experiments=len(configs))
        if not configs:
            logger.warning("No experiments to run")
            batch_result.finalize()
            return batch_result

        names = FileHandler.unique_names([c.name for c in configs])
        logger.info(f"Starting batch of {len(configs)} experiments (max workers: {self.max_workers})")

        with ThreadPoolExecutor(max_workers=self.max_workers) as executor:
            future_to_name = {}
            for config, name in zip(configs, names):
                if self._cancel_flag.is_set():
                    logger.info("Batch cancelled before submission")
                    break
                out_dir = FileHandler.experiment_dir(self.output_root, name)
                future = executor.submit(self._run_single, config, out_dir)
                future_to_name[future] = name

            collected: Dict[str, ExperimentResult] = {}
            for future in as_completed(future_to_name):
                name = future_to_name[future]
                try:
                    result = future.result()
                except Exception as e:
                    logger.error(f"Unexpected error running {name}: {e}")
                    config = configs[names.index(name)]
                    result = ExperimentResult(name=name, command=config.command, model=config.model,
                                              status=ExperimentStatus.ERROR, error=self._error(name, e))
                collected[name] = result
                batch_result.add_result(result)
                self._notify(result)

        # submission order keeps the summary deterministic
        finished = [name for name in names if name in collected]
        batch_result.results = [collected[name] for name in finished]
        batch_result.finalize()

        summary = {
            "total_experiments": batch_result.total_experiments,
            "passed": batch_result.passed,
            "failed": batch_result.failed,
            "aborted": batch_result.aborted,
            "cancelled": batch_result.cancelled,
            "exit_code": batch_result.exit_code,
            "experiments": [
                {"name": name, "status": r.status.value, "exit_code": r.exit_code}
                for name, r in zip(finished, batch_result.results)
            ],
        }
        ReportWriter(self.output_root, self.settings.reporting.float_digits).write_json("batch_summary", summary)

        logger.info(f"Batch complete: {batch_result.passed} passed, {batch_result.failed} failed, "
                    f"{batch_result.aborted} aborted, {batch_result.cancelled} cancelled "
                    f"(total time: {batch_result.total_time_seconds:.2f}s)")
        return batch_result

    def _run_single(self, config: ExperimentConfig, out_dir: Path) -> ExperimentResult:
        if self._cancel_flag.is_set():
            logger.info(f"Skipping {config.name} due to cancellation")
            return ExperimentResult(name=config.name, command=config.command, model=config.model,
                                    status=ExperimentStatus.CANCELLED)
        return self.run(config, out_dir)

    def _notify(self, result: ExperimentResult):
        if self.progress_callback:
            try:
                self.progress_callback(result)
            except Exception as e:
                logger.error(f"Error in progress callback: {e}")

    def cancel(self):
        """Cancel the remaining experiments of a batch"""
        logger.warning("Cancellation requested")
        self._cancel_flag.set()

    def is_cancelled(self) -> bool:
        return self._cancel_flag.is_set()
