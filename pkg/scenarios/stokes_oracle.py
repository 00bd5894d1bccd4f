"""
Linear exactness: n Duhamel steps of the homogeneous Stokes evolution
against one application of T(t) to the initial velocity.
"""

from typing import Iterator

from core.config import ScenarioConfig
from dynamics.duhamel import DuhamelStepper, single_shot
from dynamics.state import RunHistory, SimState
from logging_config import get_logger
from scenarios.base import (
    ScenarioContext,
    ScenarioResult,
    evolve,
    history_columns,
    stage,
)
from scenarios.presets import initial_vorticity

logger = get_logger("scenario.stokes_oracle")


def run(
    config: ScenarioConfig, context: ScenarioContext
) -> Iterator[int | ScenarioResult]:
    result = ScenarioResult()
    grid = config.grid.build()
    dt, t_end = config.time.dt, config.time.t_end

    state = SimState.initial(initial_vorticity(grid, config.initial))
    stepper = DuhamelStepper(
        grid,
        dt,
        advection=False,
        pressure=False,
        kernel_cache=context.kernel_cache,
        dump_dir=context.dump_dir,
    )
    history = RunHistory()
    final = yield from evolve(stepper, state, t_end, history, progress=stage(0, 80))

    oracle = single_shot(t_end, state.u_cache, context.kernel_cache.get(grid, t_end))
    gap = (final.omega - oracle).sup()
    relative_gap = gap / max(oracle.sup(), 1e-300)
    yield 95

    result.gate("n-step vs single-shot T(t)u0 ≤ 1e-5", gap, "<=", 1e-5)
    result.metrics["steps"] = final.step
    result.metrics["relative_gap"] = relative_gap
    result.metrics["single_shot_sup"] = oracle.sup()
    result.timeseries = history_columns(history)
    logger.info(
        f"stokes-oracle: sup gap {gap:.3e} (relative {relative_gap:.3e}) "
        f"after {final.step} steps"
    )
    yield result
