from typing import List

from .base import AbstractScenarioDispatcher, ScenarioJob
from logging_config import get_logger
from worker import ScenarioWorker

logger = get_logger("serial_dispatcher")


class SerialDispatcher(AbstractScenarioDispatcher):
    """
    Runs scenario jobs one after another in the calling process.

    The kernel cache is shared by every job, so configs that reuse a grid
    only pay for the kernel quadrature once.
    """

    def __init__(self, worker: ScenarioWorker):
        logger.info("Initializing SerialDispatcher.")
        self.worker = worker

    def dispatch(self, jobs: List[ScenarioJob]) -> List[int]:
        codes = []
        for index, job in enumerate(jobs, start=1):
            logger.info(f"Running job {index}/{len(jobs)}: {job.config_path}")
            codes.append(self.worker.process_job(job))
        return codes
