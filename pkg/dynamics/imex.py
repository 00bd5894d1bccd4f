"""
Crank-Nicolson / Adams-Bashforth stepper for the vorticity equation with
the nonlocal wall condition d2 omega + |d1| omega = -d1 p_F.
"""

from __future__ import annotations

import tempfile
from pathlib import Path
from typing import Literal, Optional

import numpy as np
from scipy import linalg

from core.errors import CFLViolationError, SimulationDivergedError, SingularSystemError
from dynamics.state import Forcing, SimState
from fields.grid import Grid, ScalarField, TensorField, VectorField, from_spectral
from fields.spectral import second_difference
from logging_config import get_logger
from operators.biot_savart import biot_savart
from operators.pressure import pF_solve

logger = get_logger("imex")

Closure = Literal["c2", "neumann"]


def cfl_bound(grid: Grid, u: VectorField, safety: float = 0.4) -> float:
    """Largest explicit step allowed by the advective CFL condition."""
    speed = u.sup()
    if speed == 0.0:
        return float("inf")
    return safety * min(grid.h2, grid.dx1) / speed


def advection_hat(
    u: VectorField, omega: ScalarField, dealias: bool = True
) -> np.ndarray:
    """Spectral coefficients of -div(u omega)."""
    grid = omega.grid
    q1 = np.fft.fft(u.u1.values * omega.values, axis=-1) / grid.N1
    q2 = np.fft.fft(u.u2.values * omega.values, axis=-1) / grid.N1
    out = -(grid.ik[None, :] * q1 + np.gradient(q2, grid.h2, axis=0, edge_order=2))
    if dealias:
        out = out * grid.dealias_mask[None, :]
    return out


def dump_state(state: SimState, directory: Optional[Path]) -> Path:
    directory = Path(directory or tempfile.gettempdir())
    directory.mkdir(parents=True, exist_ok=True)
    path = directory / f"diverged_step{state.step:06d}.npz"
    np.savez(path, t=state.t, omega=state.omega.values, step=state.step)
    return path


class ImexStepper:
    """
    Per-mode IMEX step.

    Advection is explicit (Euler on the first step, AB2 after), diffusion is
    Crank-Nicolson on D2 - k^2. The wall row is the second-order one-sided
    Robin condition; the top row fixes omega.
    """

    def __init__(
        self,
        grid: Grid,
        dt: float,
        closure: Closure = "c2",
        forcing: Optional[Forcing] = None,
        advection: bool = True,
        dealias: bool = True,
        cfl_safety: float = 0.4,
        dump_dir: Optional[Path] = None,
    ):
        if dt <= 0:
            raise ValueError(f"dt must be positive, got {dt}")
        if closure not in ("c2", "neumann"):
            raise ValueError(f"Unknown pressure closure: {closure}")
        self.grid = grid
        self.dt = dt
        self.closure = closure
        self.forcing = forcing or Forcing()
        self.advection = advection
        self.dealias = dealias
        self.cfl_safety = cfl_safety
        self.dump_dir = dump_dir
        self._banded = [self._lhs(mi) for mi in range(grid.n_modes)]
        logger.debug(
            f"ImexStepper dt={dt:.3e} closure={closure} advection={advection} "
            f"on N1={grid.N1}, N2={grid.N2}"
        )

    def _lhs(self, mi: int) -> np.ndarray:
        """Banded (l=1, u=2) storage of the implicit matrix for mode |m| = mi."""
        g, dt = self.grid, self.dt
        h, n = g.h2, g.N2
        kappa = g.mode_wavenumbers[mi]
        robin = kappa if self.closure == "c2" and mi != g.N1 // 2 else 0.0
        ab = np.zeros((4, n))
        # ab[2 + i - j, j] = a[i, j]
        ab[2, 1:-1] = 1.0 + dt / h**2 + 0.5 * dt * kappa**2
        ab[1, 2:] = -0.5 * dt / h**2
        ab[3, :-2] = -0.5 * dt / h**2
        ab[2, 0] = -1.5 / h + robin
        ab[1, 1] = 2.0 / h
        ab[0, 2] = -0.5 / h
        ab[2, -1] = 1.0
        ab[3, -2] = 0.0
        return ab

    def _wall_pressure(self, state: SimState) -> np.ndarray:
        """Spectral d1 p_F on the wall for the current velocity."""
        if self.closure != "c2" or not self.advection:
            return np.zeros(self.grid.N1, dtype=complex)
        return pF_solve(TensorField.outer(state.u_cache, scale=-1.0)).wall_d1pF.spectral

    def step(self, state: SimState, first_order: bool = False) -> SimState:
        """
        Advance one step of size dt.

        Args:
            state: Current state.
            first_order: Ignore the stored history (Euler advection, no
                extrapolation of the wall pressure).

        Raises:
            CFLViolationError: If dt exceeds the advective bound.
            SimulationDivergedError: If the new state is not finite.
        """
        g, dt = self.grid, self.dt
        t_new = state.t + dt
        omega_hat = state.omega.spectral

        if self.advection:
            bound = cfl_bound(g, state.u_cache, self.cfl_safety)
            if dt > bound:
                raise CFLViolationError(dt, bound)
            adv = advection_hat(state.u_cache, state.omega, self.dealias)
        else:
            adv = np.zeros_like(omega_hat)
        restart = first_order or state.prev_advection is None
        explicit = adv if restart else 1.5 * adv - 0.5 * state.prev_advection

        wall_now = self._wall_pressure(state)
        if first_order or state.prev_wall_d1pF is None:
            wall_data = -wall_now
        else:
            wall_data = -(2.0 * wall_now - state.prev_wall_d1pF)

        rhs = omega_hat + 0.5 * dt * (
            second_difference(omega_hat, g.h2) - (g.k**2)[None, :] * omega_hat
        )
        rhs += dt * explicit
        if self.forcing.body is not None:
            rhs += dt * self.forcing.body(state.t + 0.5 * dt).spectral
        if self.forcing.wall is not None:
            wall_data = wall_data + self.forcing.wall(t_new).spectral
        rhs[0] = wall_data
        rhs[-1] = 0.0 if self.forcing.top is None else self.forcing.top(t_new).spectral

        new_hat = np.empty_like(omega_hat)
        for mi in range(g.n_modes):
            cols = g.mode_index == mi
            try:
                new_hat[:, cols] = linalg.solve_banded(
                    (1, 2), self._banded[mi], rhs[:, cols]
                )
            except linalg.LinAlgError as e:
                raise SingularSystemError(f"IMEX solve failed at |m|={mi}") from e
        new_hat[:, g.nyquist] = 0.0

        if not np.all(np.isfinite(new_hat)):
            path = dump_state(state, self.dump_dir)
            logger.error(
                f"Non-finite vorticity at t={t_new:.4e}", extra={"step": state.step + 1}
            )
            raise SimulationDivergedError(f"IMEX step diverged at t={t_new:.4e}", path)

        omega = from_spectral(g, new_hat)
        return SimState(
            t=t_new,
            omega=omega,
            u_cache=biot_savart(omega),
            prev_advection=adv,
            prev_wall_d1pF=wall_now,
            step=state.step + 1,
        )


__all__ = ["ImexStepper", "cfl_bound", "advection_hat", "dump_state", "Closure"]
