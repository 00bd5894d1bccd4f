"""
Short-time smoothing from rough band-limited no-slip data.
"""

from typing import Callable, Generator, Iterator

from core.config import InitialConfig, ScenarioConfig
from diagnostics.smoothing import SLOPE_TOLERANCE, smoothing_rate_check
from dynamics.imex import ImexStepper
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

logger = get_logger("scenario.smoothing_rates")


def _run(
    config: ScenarioConfig,
    context: ScenarioContext,
    initial: InitialConfig,
    progress: Callable[[float], int],
) -> Generator[int, None, RunHistory]:
    grid = config.grid.build()
    stepper = ImexStepper(
        grid,
        config.time.dt,
        closure=config.closure.pressure,
        cfl_safety=context.cfl_safety,
        dump_dir=context.dump_dir,
    )
    history = RunHistory()
    state = SimState.initial(initial_vorticity(grid, initial))
    yield from evolve(stepper, state, config.time.t_end, history, progress=progress)
    return history


def run(
    config: ScenarioConfig, context: ScenarioContext
) -> Iterator[int | ScenarioResult]:
    result = ScenarioResult()
    t_min = config.get_float("t_min", 1e-3)
    t_max = config.get_float("t_max", config.time.t_end)

    rough = yield from _run(config, context, config.initial, stage(0, 60))
    report = smoothing_rate_check(rough, t_min, t_max)
    for m, fit in report.raw.items():
        floor = -m / 2.0 - SLOPE_TOLERANCE
        result.gate(f"raw slope grad{m}_u ≥ {floor:g}", fit.exponent, ">=", floor)
    for name, fit in report.compensated.items():
        result.gate(
            f"compensated slope {name} ≥ -{SLOPE_TOLERANCE:g}",
            fit.exponent,
            ">=",
            -SLOPE_TOLERANCE,
        )
    result.metrics["rough"] = report.to_dict()
    result.timeseries = history_columns(rough)

    control = InitialConfig(preset=config.extra.get("control_preset", "vortex_pair"))
    smooth = yield from _run(config, context, control, stage(60, 100))
    control_report = smoothing_rate_check(smooth, t_min, t_max)
    result.metrics["smooth_control"] = control_report.to_dict()

    logger.info(
        f"smoothing-rates: raw slopes {report.raw[1].exponent:.3f} (m=1), "
        f"{report.raw[2].exponent:.3f} (m=2), passed={report.passed}"
    )
    yield result
