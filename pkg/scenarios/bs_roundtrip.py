"""
Biot-Savart round trip and the no-slip trace identity.

The vortex-pair vorticity is pushed through biot_savart and curled back on
a sequence of vertically refined grids. On the finest grid the wall trace
functional of that no-slip vorticity must vanish, while the trace of a
nonnegative blob of unit mass must stay strictly positive.
"""

from typing import Iterator

import numpy as np

from core.config import ScenarioConfig
from diagnostics.fits import observed_order
from fields.grid import l2_norm
from fields.spectral import curl, divergence
from logging_config import get_logger
from operators.biot_savart import (
    biot_savart,
    trace_functional,
    trace_functional_direct,
    trace_lower_bound,
)
from scenarios.base import ScenarioContext, ScenarioResult
from scenarios.presets import blob, vortex_pair

logger = get_logger("scenario.bs_roundtrip")


def run(
    config: ScenarioConfig, context: ScenarioContext
) -> Iterator[int | ScenarioResult]:
    result = ScenarioResult()
    base = config.grid.build()
    levels = config.get_int("refinements", 3)
    grids = [base.refined(vertical=2**r) for r in range(levels)]

    h, errors, div_sup, wall_u2 = [], [], 0.0, 0.0
    for i, grid in enumerate(grids):
        _, omega = vortex_pair(grid, config.initial)
        u = biot_savart(omega)
        errors.append(l2_norm(curl(u) - omega) / l2_norm(omega))
        h.append(grid.h2)
        div_sup = max(div_sup, divergence(u).sup())
        wall_u2 = max(wall_u2, float(np.max(np.abs(u.u2.values[0]))))
        logger.info(f"Round trip on N2={grid.N2}: relative L2 error {errors[-1]:.3e}")
        yield int(60 * (i + 1) / len(grids))

    order = observed_order(h, errors)
    result.gate("order ≥ 1.8", order, ">=", 1.8)
    result.gate("div u ≤ 1e-10", div_sup, "<=", 1e-10)
    result.gate("u2 wall value = 0", wall_u2, "<=", 0.0)
    result.metrics["roundtrip_errors"] = {"h2": h, "relative_l2": errors}

    finest = grids[-1]
    _, omega = vortex_pair(finest, config.initial)
    b = trace_functional(omega)
    result.gate("no-slip trace ≤ 1e-6", b.sup(), "<=", 1e-6)
    yield 75

    unit = config.initial.model_copy(update={"amplitude": 1.0})
    mass = blob(finest, unit)
    b_spectral = trace_functional(mass)
    b_direct = trace_functional_direct(mass)
    bound = trace_lower_bound(mass)
    min_spectral = float(np.min(b_spectral.values))
    margin = float(np.min(b_direct.values)) - bound
    result.gate("min trace (blob) > 0", min_spectral, ">=", np.finfo(float).tiny)
    result.gate("min trace ≥ kernel lower bound", margin, ">=", 0.0)
    result.metrics["trace_lower_bound"] = bound
    result.metrics["trace_spectral_vs_direct"] = (b_spectral - b_direct).sup()
    yield 100

    logger.info(
        f"bs-roundtrip: observed order {order:.3f}, no-slip trace {b.sup():.3e}"
    )
    yield result
