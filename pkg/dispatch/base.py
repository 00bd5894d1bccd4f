from abc import ABC, abstractmethod
from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional


@dataclass(frozen=True)
class ScenarioJob:
    """
    One `vhp run` config file to execute.

    Attributes:
        config_path: Scenario config file.
        out_dir: Exact run directory; overrides everything else.
        root: Directory under which `<scenario>-<run id>` is created when
            `out_dir` is not given.
        seed: Overrides the config seed.
    """

    config_path: Path
    out_dir: Optional[Path] = None
    root: Optional[Path] = None
    seed: Optional[int] = None


class AbstractScenarioDispatcher(ABC):
    """
    Abstract base class for a scenario dispatcher.

    This interface defines the contract for executing scenario jobs.
    Concrete implementations will handle the specific logic for different
    execution backends (in-process or a pool of spawned processes).
    """

    @abstractmethod
    def dispatch(self, jobs: List[ScenarioJob]) -> List[int]:
        """
        Executes a batch of jobs and waits for all of them.

        Args:
            jobs: The jobs, one per config file.

        Returns:
            The exit code of each job, in job order.
        """
        pass
