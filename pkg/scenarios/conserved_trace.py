"""
Conserved boundary trace.

Under the C2 pressure closure the wall trace functional of the vorticity
stays at its initial value. The drift is measured at the configured
resolution, again with dt and h2 halved, and in an ablation run whose wall
condition drops the pressure source.
"""

from typing import Callable, Generator, Iterator

import numpy as np

from core.config import ScenarioConfig
from core.errors import InvalidFieldError
from diagnostics.fits import observed_order
from diagnostics.monitors import (
    conserved_trace_monitor,
    spatial_decay_fit,
    temporal_decay_series,
    top_leakage_monitor,
    vorticity_wall_residual,
)
from dynamics.imex import ImexStepper
from dynamics.shear import c2_residual
from dynamics.state import RunHistory, SimState
from fields.grid import Grid
from logging_config import get_logger
from scenarios.base import (
    ScenarioContext,
    ScenarioResult,
    evolve,
    history_columns,
    stage,
)
from scenarios.presets import initial_vorticity

logger = get_logger("scenario.conserved_trace")


def _trace_run(
    config: ScenarioConfig,
    context: ScenarioContext,
    grid: Grid,
    dt: float,
    closure: str,
    progress: Callable[[float], int],
    keep_snapshots: bool = False,
) -> Generator[int, None, tuple[RunHistory, SimState]]:
    stepper = ImexStepper(
        grid,
        dt,
        closure=closure,
        cfl_safety=context.cfl_safety,
        dump_dir=context.dump_dir,
    )
    history = RunHistory(keep_snapshots=keep_snapshots)
    interval = config.get_float("record_interval", 1e-2)
    record_every = max(1, int(round(interval / dt)))
    state = SimState.initial(initial_vorticity(grid, config.initial))
    final = yield from evolve(
        stepper, state, config.time.t_end, history, record_every, progress
    )
    return history, final


def run(
    config: ScenarioConfig, context: ScenarioContext
) -> Iterator[int | ScenarioResult]:
    result = ScenarioResult()
    grid = config.grid.build()
    dt = config.time.dt

    coarse, coarse_final = yield from _trace_run(
        config, context, grid, dt, "c2", stage(0, 25), keep_snapshots=True
    )
    fine, fine_final = yield from _trace_run(
        config, context, grid.refined(vertical=2), 0.5 * dt, "c2", stage(25, 75)
    )
    ablation, _ = yield from _trace_run(
        config, context, grid, dt, "neumann", stage(75, 95)
    )

    drift = conserved_trace_monitor(coarse)
    drift_fine = conserved_trace_monitor(fine)
    drift_neumann = conserved_trace_monitor(ablation)
    order = observed_order([dt, 0.5 * dt], [drift.max_drift, drift_fine.max_drift])
    result.gate("trace drift ≤ 1e-3", drift.max_drift, "<=", 1e-3)
    result.gate("trace drift order ≥ 1", order, ">=", 1.0)
    result.gate(
        "Neumann ablation drift ≥ 10x C2 drift",
        drift_neumann.max_drift / max(drift.max_drift, 1e-300),
        ">=",
        10.0,
    )

    wall = [vorticity_wall_residual(coarse_final), vorticity_wall_residual(fine_final)]
    wall_order = observed_order([dt, 0.5 * dt], wall)
    result.gate("wall residual order ≥ 1", wall_order, ">=", 1.0)

    result.metrics["trace_drift"] = {
        "c2": drift.to_dict(),
        "c2_refined": drift_fine.to_dict(),
        "neumann": drift_neumann.to_dict(),
    }
    result.metrics["wall_residual"] = wall
    result.metrics["top_leakage"] = top_leakage_monitor(coarse)
    result.metrics["momentum_residual_sup"] = c2_residual(coarse.snapshots).sup
    try:
        decay_fit = spatial_decay_fit(coarse_final.omega)
        result.metrics["vertical_decay_fit"] = decay_fit.to_dict()
    except InvalidFieldError as e:
        logger.warning(f"Vertical decay fit skipped: {e}")
        result.metrics["vertical_decay_fit"] = None

    result.timeseries = history_columns(coarse)
    decay = temporal_decay_series(coarse)
    result.series["decay_sup_omega"] = (decay["t"], decay["sup_omega"])
    result.series["decay_sup_d1_omega"] = (decay["t"], decay["sup_d1_omega"])
    result.series["trace_drift_neumann"] = (
        np.asarray(ablation.times),
        ablation.trace_drift(),
    )
    logger.info(
        f"conserved-trace: drift {drift.max_drift:.3e} (C2), "
        f"{drift_neumann.max_drift:.3e} (Neumann), order {order:.2f}"
    )
    yield 100
    yield result
