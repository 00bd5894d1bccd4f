"""
Gaussian envelope of the drift-diffusion fundamental solution.

A mollified delta is evolved on the doubled strip twice: with no drift,
where it must reproduce the heat kernel and saturate the envelope, and
with a capped type-I cellular drift, where the envelope shifted by the
recorded drift integral must still hold.
"""

from typing import Iterator

import numpy as np

from core.config import ScenarioConfig
from diagnostics.envelope import (
    EnvelopeParams,
    envelope_values,
    gaussian_envelope_check,
    l1_linf_smoothing,
)
from diagnostics.monitors import POSITIVITY_TOLERANCE
from dynamics.transport import (
    StreamDrift,
    TypeOneAmplitude,
    heat_transport_fundamental,
)
from logging_config import get_logger
from scenarios.base import ScenarioContext, ScenarioResult

logger = get_logger("scenario.green_envelope")


def run(
    config: ScenarioConfig, context: ScenarioContext
) -> Iterator[int | ScenarioResult]:
    result = ScenarioResult()
    grid = config.grid.build()
    dt, elapsed = config.time.dt, config.time.t_end
    s = config.get_float("source_time", 0.0)
    y = (0.5 * grid.L1, config.get_float("source_height", 0.25 * grid.H))

    heat = heat_transport_fundamental(grid, s, y, s + elapsed, dt)
    analytic = envelope_values(heat, EnvelopeParams.heat())
    heat_report = gaussian_envelope_check(heat, EnvelopeParams.heat())
    smoothing = l1_linf_smoothing(heat, config.get_float("smoothing_t_min", dt))
    heat_error = float(np.max(np.abs(heat.w - analytic)))
    result.gate("heat: sup error vs analytic ≤ 1e-4", heat_error, "<=", 1e-4)
    result.gate(
        "heat: envelope ratio ≤ 1 + 1e-3", heat_report.max_ratio, "<=", 1.0 + 1e-3
    )
    result.gate(
        "heat: L1-Linf slope in [-1.15, -0.85]", smoothing.exponent, "in", -1.15, -0.85
    )
    result.metrics["heat"] = heat_report.to_dict()
    result.metrics["heat_smoothing_fit"] = smoothing.to_dict()
    result.metrics["c2_doubled_max_ratio"] = gaussian_envelope_check(
        heat, EnvelopeParams.heat().scaled(c2=2.0)
    ).max_ratio
    yield 40

    M = config.get_float("type_one_M", 0.5)
    amplitude = TypeOneAmplitude(
        M=M,
        T=s + elapsed + config.get_float("blowup_margin", 1e-2),
        cap=config.get_float("speed_cap", 5.0),
    )
    cell_width = config.get_float("cell_width", 0.5 * grid.H)
    drift = StreamDrift.cellular(amplitude, grid.L1, cell_width)
    sol = heat_transport_fundamental(grid, s, y, s + elapsed, dt, drift=drift)
    yield 85

    report = gaussian_envelope_check(sol, EnvelopeParams.for_solution(sol))
    result.gate("type-I: envelope ratio ≤ 1.05", report.max_ratio, "<=", 1.05)
    result.gate("type-I: mass drift ≤ 1e-6", report.mass_drift, "<=", 1e-6)
    result.gate("type-I: min w ≥ -1e-10", report.min_w, ">=", -POSITIVITY_TOLERANCE)
    result.metrics["type_one"] = report.to_dict()
    result.metrics["type_one_constants_max_ratio"] = gaussian_envelope_check(
        sol, EnvelopeParams.from_type_one(M, sol.drift_integral)
    ).max_ratio
    result.metrics["neumann_restriction_mass"] = float(
        np.sum(sol.neumann_restriction()) * sol.grid.dx1 * sol.grid.h2
    )

    result.timeseries = {
        "t": sol.times,
        "sup_omega": sol.sup_history,
        "mass": sol.mass_history,
    }
    result.series["drift_speed"] = (sol.drift_times, sol.drift_speeds)
    result.series["heat_sup"] = (heat.times, heat.sup_history)
    yield 100

    logger.info(
        f"green-envelope: heat ratio {heat_report.max_ratio:.4f}, "
        f"type-I ratio {report.max_ratio:.4f}, drift integral {sol.drift_integral:.3e}"
    )
    yield result
