from typing import Optional

from core.config import Settings
from core.dependencies import get_settings
from .base import AbstractScenarioDispatcher
from .process import ProcessDispatcher
from .serial import SerialDispatcher
from logging_config import get_logger
from worker import ScenarioWorker

logger = get_logger("dispatcher_factory")

_serial_dispatcher_instance = None
_process_dispatcher_instance = None


def get_dispatcher(settings: Optional[Settings] = None) -> AbstractScenarioDispatcher:
    """
    Returns the scenario dispatcher for the configured backend.

    This factory reads `EXECUTION_BACKEND` from the settings and returns
    a singleton instance of the corresponding dispatcher.

    Args:
        settings: The process settings; loaded from the environment if omitted.

    Returns:
        An instance of a class that implements AbstractScenarioDispatcher.
    """
    global _serial_dispatcher_instance, _process_dispatcher_instance
    settings = settings or get_settings()

    if settings.EXECUTION_BACKEND == "serial":
        if _serial_dispatcher_instance is None:
            logger.info("Creating singleton instance of SerialDispatcher.")
            _serial_dispatcher_instance = SerialDispatcher(ScenarioWorker(settings))
        return _serial_dispatcher_instance

    elif settings.EXECUTION_BACKEND == "process":
        if _process_dispatcher_instance is None:
            logger.info("Creating singleton instance of ProcessDispatcher.")
            _process_dispatcher_instance = ProcessDispatcher(
                settings.THREADS, settings.LOG_LEVEL
            )
        return _process_dispatcher_instance

    else:
        # Prevented by the Literal on Settings.EXECUTION_BACKEND
        raise ValueError(f"Invalid EXECUTION_BACKEND: {settings.EXECUTION_BACKEND}")
