import json
import time
import uuid
from pathlib import Path
from typing import Any, Dict, Literal, Optional

from pydantic import BaseModel

from logging_config import get_logger

logger = get_logger("run_service")

RunStatus = Literal["queued", "running", "completed", "failed"]


class RunRecord(BaseModel):
    id: str
    scenario: str
    status: RunStatus = "queued"
    progress: int = 0
    created_at: float
    started_at: float = 0.0
    finished_at: float = 0.0
    exit_code: Optional[int] = None
    error_detail: str = ""


class RunService:
    """
    A service for managing the lifecycle of scenario runs.

    Each run has a directory under `root`; its record is persisted there as
    `run.json` on every status change, so a crashed batch still leaves an
    accurate account of what finished.
    """

    def __init__(self, root: Path):
        """
        Initializes the RunService.

        Args:
            root: Directory under which run directories are created.
        """
        self.root = Path(root)
        self._records: Dict[str, RunRecord] = {}
        self._dirs: Dict[str, Path] = {}

    def create_run(
        self,
        scenario: str,
        out_dir: Optional[Path] = None,
        run_id: Optional[str] = None,
    ) -> RunRecord:
        """
        Creates a new run record with an initial 'queued' status.

        Args:
            scenario: The scenario id.
            out_dir: Run directory; defaults to `<root>/<scenario>-<id>`.
            run_id: Identifier; a fresh one is generated when omitted.
        """
        run_id = run_id or uuid.uuid4().hex[:12]
        record = RunRecord(id=run_id, scenario=scenario, created_at=time.time())
        if out_dir is not None:
            run_dir = Path(out_dir)
        else:
            run_dir = self.root / f"{scenario}-{run_id}"
        run_dir.mkdir(parents=True, exist_ok=True)
        self._records[run_id] = record
        self._dirs[run_id] = run_dir
        self._persist(run_id)
        logger.info(
            f"Created run record {run_id} for scenario '{scenario}' in {run_dir}"
        )
        return record

    def run_dir(self, run_id: str) -> Path:
        return self._dirs[run_id]

    def get_run(self, run_id: str) -> Optional[RunRecord]:
        return self._records.get(run_id)

    def update_progress(self, run_id: str, progress: int) -> None:
        """Updates the progress of a run; persisted only on status changes."""
        record = self._records[run_id]
        record.progress = max(record.progress, min(100, int(progress)))

    def set_run_status(self, run_id: str, status: RunStatus) -> None:
        """
        Updates the status of a run and sets timestamps accordingly.

        Args:
            run_id: The ID of the run to update.
            status: The new status ('running', 'completed', 'failed').
        """
        record = self._records[run_id]
        record.status = status
        if status == "running":
            record.started_at = time.time()
        elif status in ("completed", "failed"):
            record.finished_at = time.time()
        if status == "completed":
            record.progress = 100
            record.exit_code = 0
        self._persist(run_id)
        logger.info(
            f"Set status for run {run_id} to '{status}'.", extra={"run_id": run_id}
        )

    def set_run_as_failed(
        self, run_id: str, error_message: str, exit_code: int
    ) -> None:
        """
        Marks a run as failed and stores the error details.

        Args:
            run_id: The ID of the run.
            error_message: A description of the error that occurred.
            exit_code: The process exit code the failure maps to.
        """
        record = self._records[run_id]
        record.error_detail = error_message
        record.exit_code = exit_code
        self.set_run_status(run_id, "failed")
        logger.error(f"Marked run {run_id} as failed. Reason: {error_message}")

    def _persist(self, run_id: str) -> None:
        path = self._dirs[run_id] / "run.json"
        path.write_text(json.dumps(self._records[run_id].model_dump(), indent=2))

    def as_dict(self, run_id: str) -> Dict[str, Any]:
        return self._records[run_id].model_dump()
