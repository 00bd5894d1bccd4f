import importlib
from types import ModuleType
from typing import Iterator

from core.config import AVAILABLE_SCENARIOS, ScenarioConfig
from core.errors import (
    ConfigError,
    InvalidFieldError,
    UnknownScenarioError,
    VHPError,
)
from dynamics.imex import cfl_bound
from logging_config import get_logger
from operators.biot_savart import biot_savart
from scenarios.base import ScenarioContext, ScenarioResult
from scenarios.presets import initial_vorticity

logger = get_logger("engine")


def load_scenario(scenario_id: str) -> ModuleType:
    """
    Imports the implementation module of a registered scenario.

    Args:
        scenario_id: Key of AVAILABLE_SCENARIOS, e.g. "bs-roundtrip".

    Returns:
        The module; its `run(config, context)` generator drives the scenario.

    Raises:
        UnknownScenarioError: If the id is not registered.
    """
    entry = AVAILABLE_SCENARIOS.get(scenario_id)
    if entry is None:
        raise UnknownScenarioError(
            f"Unknown scenario '{scenario_id}'. "
            f"Available: {', '.join(AVAILABLE_SCENARIOS)}"
        )
    impl = entry["impl"]
    logger.debug(f"Loading scenario '{scenario_id}' from scenarios.{impl}")
    return importlib.import_module(f"scenarios.{impl}")


def cfl_precheck(config: ScenarioConfig, safety: float) -> float:
    """
    Checks the configured dt against the advective bound of the initial data.

    Returns:
        The bound.

    Raises:
        ConfigError: If the initial data cannot be built or dt exceeds the bound.
    """
    grid = config.grid.build()
    try:
        u0 = biot_savart(initial_vorticity(grid, config.initial))
    except InvalidFieldError as e:
        raise ConfigError(f"Invalid initial data for '{config.scenario}': {e}") from e
    bound = cfl_bound(grid, u0, safety)
    if config.time.dt > bound:
        raise ConfigError(
            f"dt={config.time.dt:.3e} fails the CFL precheck for '{config.scenario}' "
            f"(bound {bound:.3e} at safety {safety})"
        )
    logger.debug(f"CFL precheck passed: dt={config.time.dt:.3e} <= {bound:.3e}")
    return bound


def run_scenario(
    config: ScenarioConfig, context: ScenarioContext
) -> Iterator[int | ScenarioResult]:
    """
    Runs one scenario.

    This function is a generator that yields progress updates (as integers from 0-100)
    and concludes by yielding the ScenarioResult.

    Args:
        config: The validated scenario configuration.
        context: Kernel cache, CFL safety and dump directory for the run.

    Yields:
        Progress percentage (int) or the final result.
    """
    module = load_scenario(config.scenario)
    if config.advances_flow:
        cfl_precheck(config, context.cfl_safety)
    yield 0

    result = None
    for item in module.run(config, context):
        if isinstance(item, ScenarioResult):
            result = item
        else:
            yield min(99, int(item))

    if result is None:
        raise VHPError(f"Scenario '{config.scenario}' finished without a result")
    yield result
