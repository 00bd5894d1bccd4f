"""
Scheme cross-check.

The IMEX and Duhamel steppers advance the same nonlinear flow to a common
time for a sequence of step sizes; their difference must shrink at least
linearly in dt. A manufactured solution then pins the IMEX stepper's own
orders in h2 and dt.
"""

import warnings
from typing import Iterator

import numpy as np

from core.config import ScenarioConfig
from core.errors import DomainTruncationWarning
from diagnostics.fits import observed_order
from dynamics.duhamel import DuhamelStepper
from dynamics.imex import ImexStepper
from dynamics.state import Forcing, RunHistory, SimState, march
from fields.grid import BoundaryTrace, Grid, ScalarField
from logging_config import get_logger
from scenarios.base import (
    ScenarioContext,
    ScenarioResult,
    evolve,
    history_columns,
    stage,
)
from scenarios.presets import initial_vorticity

logger = get_logger("scenario.nonlinear_cross_check")


def manufactured_vorticity(grid: Grid, t: float) -> ScalarField:
    """omega = exp(-t) cos(x1) cos(x2), for L1 = 2 pi."""
    X1, X2 = grid.mesh()
    return ScalarField(grid, np.exp(-t) * np.cos(X1) * np.cos(X2))


def manufactured_forcing(grid: Grid) -> Forcing:
    """Body, wall and top data making `manufactured_vorticity` exact when linear."""
    return Forcing(
        body=lambda t: manufactured_vorticity(grid, t),
        wall=lambda t: BoundaryTrace(grid, np.exp(-t) * np.cos(grid.x1)),
        top=lambda t: BoundaryTrace(
            grid, np.exp(-t) * np.cos(grid.x1) * np.cos(grid.H)
        ),
    )


def manufactured_run(grid: Grid, dt: float, t_end: float) -> ScalarField:
    """Linear IMEX run of the manufactured problem; returns omega(t_end)."""
    stepper = ImexStepper(grid, dt, forcing=manufactured_forcing(grid), advection=False)
    with warnings.catch_warnings():
        # the manufactured field does not decay toward the top
        warnings.simplefilter("ignore", DomainTruncationWarning)
        state = SimState.initial(manufactured_vorticity(grid, 0.0))
        for state in march(stepper, state, t_end):
            pass
    return state.omega


def run(
    config: ScenarioConfig, context: ScenarioContext
) -> Iterator[int | ScenarioResult]:
    result = ScenarioResult()
    grid = config.grid.build()
    t_cmp = config.time.t_end
    closure = config.closure.pressure
    omega0 = initial_vorticity(grid, config.initial)

    dts = config.get_floats("dts", [4e-3, 2e-3, 1e-3])
    gaps, history = [], RunHistory()
    span = 70 // len(dts)
    for i, dt in enumerate(dts):
        start = SimState.initial(omega0)
        imex = ImexStepper(
            grid,
            dt,
            closure=closure,
            cfl_safety=context.cfl_safety,
            dump_dir=context.dump_dir,
        )
        finest = i == len(dts) - 1
        mid = i * span + span // 2
        a = yield from evolve(
            imex,
            start,
            t_cmp,
            history if finest else None,
            progress=stage(i * span, mid),
        )
        duhamel = DuhamelStepper(
            grid,
            dt,
            closure=closure,
            kernel_cache=context.kernel_cache,
            cfl_safety=context.cfl_safety,
            dump_dir=context.dump_dir,
        )
        b = yield from evolve(
            duhamel, start, t_cmp, progress=stage(mid, (i + 1) * span)
        )
        gaps.append((a.omega - b.omega).sup() / max(a.omega.sup(), 1e-300))
        logger.info(f"dt={dt:.1e}: IMEX vs Duhamel relative gap {gaps[-1]:.3e}")

    scheme_order = observed_order(dts, gaps)
    result.gate("IMEX vs Duhamel order in dt ≥ 1", scheme_order, ">=", 1.0)
    result.metrics["scheme_gap"] = {"dt": dts, "relative_sup": gaps}
    result.series["scheme_gap"] = (np.asarray(dts), np.asarray(gaps))
    result.timeseries = history_columns(history)

    mms_L1 = 2.0 * np.pi
    mms_t = config.get_float("mms_t_end", 0.02)
    mms_dt = config.get_float("mms_dt", 1e-4)
    h, errors = [], []
    for n2 in config.get_ints("mms_N2", [17, 33, 65]):
        level = Grid(mms_L1, 8, np.pi, n2)
        omega = manufactured_run(level, mms_dt, mms_t)
        errors.append((omega - manufactured_vorticity(level, mms_t)).sup())
        h.append(level.h2)
    result.gate("MMS order in h2 ≥ 1.8", observed_order(h, errors), ">=", 1.8)
    result.metrics["mms_space"] = {"h2": h, "sup_error": errors}
    yield 85

    level = Grid(mms_L1, 8, np.pi, config.get_int("mms_time_N2", 33))
    t_rich = config.get_float("mms_time_t_end", 0.2)
    steps = config.get_floats("mms_dts", [8e-3, 4e-3, 2e-3, 1e-3])
    runs = [manufactured_run(level, dt, t_rich) for dt in steps]
    diffs = [(coarse - fine).sup() for coarse, fine in zip(runs, runs[1:])]
    result.gate("MMS order in dt ≥ 1.8", observed_order(steps[:-1], diffs), ">=", 1.8)
    result.metrics["mms_time"] = {"dt": steps[:-1], "successive_diff": diffs}
    yield 100

    yield result
