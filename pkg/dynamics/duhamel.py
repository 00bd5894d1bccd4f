"""
One-step Duhamel integrator built on the duality operator T(t).

    omega(t+dt) = T(dt) u(t) + dt T(dt/2) divF(t+dt/2) + dt e^{(dt/2)B}(d1 p_F delta)

with divF = -div(u (x) u) and the midpoint velocity from a provisional IMEX
half step. Switching off advection and pressure leaves the homogeneous
Stokes evolution omega(t+dt) = T(dt) u(t).
"""

from __future__ import annotations

from pathlib import Path
from typing import Optional

from core.errors import InvalidFieldError, SimulationDivergedError
from dynamics.imex import Closure, ImexStepper, dump_state
from dynamics.state import SimState
from fields.grid import Grid, ScalarField, TensorField, VectorField
from fields.spectral import d_tangential, d_vertical
from logging_config import get_logger
from operators.biot_savart import biot_savart
from operators.kernels import KernelTable, T_apply, eB_boundary_apply
from operators.pressure import pF_solve

logger = get_logger("duhamel")


def convection_flux(u: VectorField) -> VectorField:
    """-div(u (x) u), componentwise."""
    a, b = u.u1, u.u2
    return VectorField(
        -(d_tangential(a * a) + d_vertical(a * b)),
        -(d_tangential(a * b) + d_vertical(b * b)),
    )


class DuhamelStepper:
    def __init__(
        self,
        grid: Grid,
        dt: float,
        closure: Closure = "c2",
        advection: bool = True,
        pressure: bool = True,
        kernel_cache=None,
        cfl_safety: float = 0.4,
        dump_dir: Optional[Path] = None,
    ):
        """
        Args:
            grid: Half-plane grid.
            dt: Step size.
            closure: "c2" applies the boundary pressure source, "neumann"
                drops it.
            advection: Include the convection flux term.
            pressure: Include the boundary pressure term.
            kernel_cache: Optional KernelCacheService supplying the dt and
                dt/2 tables.
        """
        if dt <= 0:
            raise ValueError(f"dt must be positive, got {dt}")
        self.grid = grid
        self.dt = dt
        self.advection = advection
        self.pressure = pressure and closure == "c2"
        self.dump_dir = dump_dir
        if kernel_cache is not None:
            self.table_full = kernel_cache.get(grid, dt)
            self.table_half = kernel_cache.get(grid, 0.5 * dt)
        else:
            self.table_full = KernelTable.build(grid, dt)
            self.table_half = KernelTable.build(grid, 0.5 * dt)
        self._half = ImexStepper(
            grid,
            0.5 * dt,
            closure=closure,
            advection=advection,
            cfl_safety=cfl_safety,
            dump_dir=dump_dir,
        )

    def step(self, state: SimState) -> SimState:
        dt = self.dt
        try:
            omega = T_apply(dt, state.u_cache, self.table_full)
            if self.advection or self.pressure:
                mid = self._half.step(state, first_order=True)
                u_mid = mid.u_cache
                if self.advection:
                    flux = convection_flux(u_mid)
                    omega = omega + dt * T_apply(0.5 * dt, flux, self.table_half)
                if self.pressure:
                    wall = pF_solve(TensorField.outer(u_mid, scale=-1.0)).wall_d1pF
                    source = eB_boundary_apply(0.5 * dt, wall, self.table_half)
                    omega = omega + dt * source
        except InvalidFieldError as e:
            # non-finite intermediate fields are rejected at construction
            path = dump_state(state, self.dump_dir)
            raise SimulationDivergedError(
                f"Duhamel step diverged at t={state.t + dt:.4e}", path
            ) from e

        return SimState(
            t=state.t + dt,
            omega=omega,
            u_cache=biot_savart(omega),
            step=state.step + 1,
        )


def single_shot(
    t: float, u0: VectorField, table: Optional[KernelTable] = None
) -> ScalarField:
    """Homogeneous Stokes vorticity T(t) u0 in one kernel application."""
    return T_apply(t, u0, table)


__all__ = ["DuhamelStepper", "convection_flux", "single_shot"]
