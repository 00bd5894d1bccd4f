import time
import traceback
from pathlib import Path
from typing import Any, Dict, List, Optional

import numpy as np
from pydantic import BaseModel

from core.config import Settings, load_scenario_config
from core.dependencies import get_kernel_cache, get_run_service, get_settings
from core.errors import VHPError
from dispatch.base import ScenarioJob
from engine import run_scenario
from logging_config import get_logger
from scenarios.base import ScenarioContext, ScenarioResult
from services.kernel_cache import KernelCacheService
from services.run_service import RunService
from utils import provenance, write_series

logger = get_logger("worker")

# A run whose gates do not all pass still completes, but exits with this code.
GATE_FAILURE_EXIT_CODE = 1


class Report(BaseModel):
    """The `report.json` document of one run."""

    scenario: str
    run_id: str
    passed: bool
    criteria: List[Dict[str, Any]]
    summary: List[str]
    metrics: Dict[str, Any]
    runtime_seconds: float
    provenance: Dict[str, Any]


def to_jsonable(value: Any) -> Any:
    """Converts numpy containers and scalars in a metrics tree to plain Python."""
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return to_jsonable(value.tolist())
    if isinstance(value, np.generic):
        value = value.item()
    if isinstance(value, float) and not np.isfinite(value):
        return None
    return value


def write_artifacts(run_dir: Path, result: ScenarioResult) -> None:
    """Writes `timeseries.csv` and one two-column file per extra series."""
    if result.timeseries:
        write_series(run_dir / "timeseries.csv", result.timeseries)
    for name, (t, values) in result.series.items():
        write_series(run_dir / "series" / f"{name}.csv", {"t": t, "value": values})


class ScenarioWorker:
    """
    Executes scenario jobs end to end: config, run record, scenario, artifacts.
    """

    def __init__(
        self,
        settings: Settings,
        run_service: Optional[RunService] = None,
        kernel_cache: Optional[KernelCacheService] = None,
    ):
        self.settings = settings
        self.run_service = run_service or get_run_service(settings=settings)
        self.kernel_cache = kernel_cache or get_kernel_cache(settings)

    def process_job(self, job: ScenarioJob) -> int:
        """
        Handles the complete processing of a single scenario job.

        Returns:
            The exit code: 0 when every gate passes, GATE_FAILURE_EXIT_CODE
            when some gate fails, or the exit code of the raised VHPError.
        """
        try:
            config = load_scenario_config(job.config_path, seed=job.seed)
        except VHPError as e:
            logger.error(f"Could not load {job.config_path}: {e}")
            return e.exit_code

        service = self.run_service if job.root is None else RunService(job.root)
        out_dir = job.out_dir or config.output.dir
        record = service.create_run(config.scenario, out_dir=out_dir)
        run_dir = service.run_dir(record.id)
        context_log = {"scenario": config.scenario, "run_id": record.id}
        logger.info(f"Starting scenario '{config.scenario}'", extra=context_log)
        service.set_run_status(record.id, "running")
        started = time.perf_counter()

        try:
            context = ScenarioContext(
                kernel_cache=self.kernel_cache,
                cfl_safety=self.settings.CFL_SAFETY,
                dump_dir=run_dir,
            )
            result = None
            for progress_or_result in run_scenario(config, context):
                if isinstance(progress_or_result, int):
                    service.update_progress(record.id, progress_or_result)
                else:
                    result = progress_or_result

            write_artifacts(run_dir, result)
            report = Report(
                scenario=config.scenario,
                run_id=record.id,
                passed=result.passed,
                criteria=to_jsonable([g.to_dict() for g in result.gates]),
                summary=[f"{g.name}: {g.to_dict()['status']}" for g in result.gates],
                metrics=to_jsonable(result.metrics),
                runtime_seconds=time.perf_counter() - started,
                provenance=provenance(config.model_dump(mode="json")),
            )
            (run_dir / "report.json").write_text(
                report.model_dump_json(indent=2), encoding="utf-8"
            )
            service.set_run_status(record.id, "completed")
            logger.info(
                f"Scenario '{config.scenario}' finished: passed={report.passed}",
                extra=context_log,
            )
            return 0 if report.passed else GATE_FAILURE_EXIT_CODE

        except VHPError as e:
            logger.error(
                f"Scenario '{config.scenario}' aborted: {e}",
                exc_info=True,
                extra=context_log,
            )
            service.set_run_as_failed(record.id, str(e), e.exit_code)
            return e.exit_code
        except Exception:
            logger.error(
                f"Unexpected failure in '{config.scenario}'",
                exc_info=True,
                extra=context_log,
            )
            service.set_run_as_failed(record.id, traceback.format_exc(), 1)
            return 1


def execute_job(job: ScenarioJob) -> int:
    """Entry point for spawned processes: builds a worker from the environment."""
    return ScenarioWorker(get_settings()).process_job(job)
