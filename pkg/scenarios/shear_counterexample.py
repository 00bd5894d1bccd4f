"""
Shear-flow exclusion.

A shear flow u = (u1(t, x2), 0) driven by f(t) solves the momentum equation
only with the linearly growing pressure -x1 f(t). Measured against the C2
pressure the residual is r1 = f, r2 = 0, so the only admissible shear
dynamics is unforced heat flow.
"""

from typing import Callable, Iterator

import numpy as np
from scipy import integrate

from core.config import ScenarioConfig
from dynamics.shear import c2_residual, shear_flow_solve
from dynamics.state import ForcingSeries
from fields.grid import Grid
from logging_config import get_logger
from scenarios.base import ScenarioContext, ScenarioResult
from scenarios.presets import shear_profile

logger = get_logger("scenario.shear_counterexample")


def _column(grid: Grid, n2: int) -> Grid:
    return Grid(grid.L1, grid.N1, grid.H, n2)


def image_heat_flow(
    u0: Callable[[float], float], H: float, t: float, x: np.ndarray
) -> np.ndarray:
    """
    Heat flow at time t of the odd extension of u0 cut off outside [0, H],
    by quadrature against the image kernel G(x - y) - G(x + y).
    """
    scale = 1.0 / np.sqrt(4.0 * np.pi * t)

    def value(xi: float) -> float:
        def integrand(y: float) -> float:
            image = np.exp(-((xi - y) ** 2) / (4.0 * t)) - np.exp(
                -((xi + y) ** 2) / (4.0 * t)
            )
            return scale * image * u0(y)

        points = [xi] if 0.0 < xi < H else None
        return integrate.quad(
            integrand, 0.0, H, points=points, epsabs=1e-12, limit=200
        )[0]

    return np.array([value(float(xi)) for xi in x])


def run(
    config: ScenarioConfig, context: ScenarioContext
) -> Iterator[int | ScenarioResult]:
    result = ScenarioResult()
    grid = config.grid.build()
    dt, t_end = config.time.dt, config.time.t_end

    forced = shear_flow_solve(
        grid,
        ForcingSeries.constant(1.0, t_end),
        shear_profile(grid, config.initial),
        dt,
        t_end,
    )
    stats = c2_residual(forced)
    result.gate("f ≡ 1: sup |r1 - f| ≤ 5e-3", stats.r1_minus_f_sup, "<=", 5e-3)
    result.gate("f ≡ 1: sup |r2| ≤ 1e-10", stats.r2_sup, "<=", 1e-10)
    result.metrics["forced_r1_sup"] = stats.r1_sup
    profiles = forced.profiles
    result.timeseries = {
        "t": forced.times,
        "sup_omega": np.max(np.abs(np.gradient(profiles, grid.h2, axis=1)), axis=1),
        "sup_u": np.max(np.abs(profiles), axis=1),
    }
    yield 30

    unforced = []
    for n2 in config.get_ints("refine_N2", [33, 65, 129]):
        level = _column(grid, n2)
        flow = shear_flow_solve(
            level,
            ForcingSeries.constant(0.0, t_end),
            shear_profile(level, config.initial),
            dt,
            t_end,
        )
        unforced.append(c2_residual(flow).sup)
    result.gate(
        "f ≡ 0: residual ≤ 1e-6 on every refinement", max(unforced), "<=", 1e-6
    )
    result.metrics["unforced_residual"] = unforced
    yield 50

    fine = _column(grid, config.get_int("oracle_N2", 4097))
    t_oracle = config.get_float("oracle_t_end", 1e-2)
    flow = shear_flow_solve(
        fine,
        ForcingSeries.constant(0.0, t_oracle),
        shear_profile(fine, config.initial),
        config.get_float("oracle_dt", 1e-4),
        t_oracle,
    )
    # the zero-slope top is out of reach for x2 <= H/4 at t_oracle
    amplitude = config.initial.amplitude
    near = np.flatnonzero(fine.x2 <= 0.25 * fine.H)[::32]
    def profile(y: float) -> float:
        return amplitude * np.sin(np.pi * y / fine.H)

    exact = image_heat_flow(profile, fine.H, t_oracle, fine.x2[near])
    oracle_gap = float(np.max(np.abs(flow.profiles[-1][near] - exact)))
    oracle_gap /= max(abs(amplitude), 1e-300)
    result.gate(
        "unforced vs image-kernel quadrature ≤ 1e-6", oracle_gap, "<=", 1e-6
    )
    yield 70

    forcing = ForcingSeries.constant(1.0, t_end)
    finer = fine.refined(vertical=2)
    coarse, refined = (
        shear_flow_solve(g, forcing, shear_profile(g, config.initial), dt, t_end)
        for g in (fine, finer)
    )
    u_c, u_f = coarse.profiles[-1], refined.profiles[-1][::2]
    reference = (4.0 * u_f - u_c) / 3.0
    richardson_gap = float(np.max(np.abs(u_c - reference)))
    result.gate("f ≡ 1 vs Richardson reference ≤ 1e-6", richardson_gap, "<=", 1e-6)
    yield 90

    if "forcing_csv" in config.extra:
        series = ForcingSeries.from_csv(config.extra["forcing_csv"])
        profile = shear_profile(grid, config.initial)
        custom = c2_residual(shear_flow_solve(grid, series, profile, dt, t_end))
        result.metrics["csv_forcing"] = {
            "r1_minus_f_sup": custom.r1_minus_f_sup,
            "r1_sup": custom.r1_sup,
        }
    yield 100

    logger.info(
        f"shear-counterexample: r1 - f {stats.r1_minus_f_sup:.2e}, "
        f"oracle gap {oracle_gap:.2e}"
    )
    yield result
