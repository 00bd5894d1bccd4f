import multiprocessing as mp
from concurrent.futures import ProcessPoolExecutor
from typing import List

from .base import AbstractScenarioDispatcher, ScenarioJob
from logging_config import get_logger, setup_root_logging

logger = get_logger("process_dispatcher")


def _init_worker_process(log_level: str) -> None:
    # BLAS thread variables are inherited from the parent environment.
    setup_root_logging(log_level)


def _run_job(job: ScenarioJob) -> int:
    from worker import execute_job

    return execute_job(job)


class ProcessDispatcher(AbstractScenarioDispatcher):
    """
    Runs scenario jobs in a pool of spawned worker processes.

    Each process owns its kernel cache. Jobs are independent, so results
    only differ from the serial backend in wall-clock time.
    """

    def __init__(self, max_workers: int, log_level: str = "INFO"):
        logger.info(f"Initializing ProcessDispatcher with {max_workers} processes.")
        # 'spawn' context: workers never share a forked numpy state.
        self.mp_context = mp.get_context("spawn")
        self.max_workers = max_workers
        self.log_level = log_level

    def dispatch(self, jobs: List[ScenarioJob]) -> List[int]:
        if not jobs:
            return []
        workers = min(self.max_workers, len(jobs))
        with ProcessPoolExecutor(
            max_workers=workers,
            mp_context=self.mp_context,
            initializer=_init_worker_process,
            initargs=(self.log_level,),
        ) as pool:
            futures = [pool.submit(_run_job, job) for job in jobs]
            codes = []
            for job, future in zip(jobs, futures):
                try:
                    codes.append(future.result())
                except Exception:
                    logger.error(
                        f"Worker process failed on {job.config_path}", exc_info=True
                    )
                    codes.append(1)
        return codes
