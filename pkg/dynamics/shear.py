"""
Unidirectional shear flows u = (u1(t, x2), 0) driven by a spatially uniform
forcing f(t), and the residual of the momentum equation under the
p = p_F + p_H pressure closure.

For shear flows that closure forces grad p = 0, so the residual is
r1 = f and r2 = 0: a forced shear flow is not a mild solution.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence, Union

import numpy as np
from scipy import linalg

from core.errors import InvalidFieldError
from dynamics.state import SimState
from fields.grid import Grid, ScalarField, VectorField
from fields.spectral import d_tangential, d_vertical, laplacian
from logging_config import get_logger
from operators.pressure import pressure_total_gradient

logger = get_logger("shear")


@dataclass(frozen=True, eq=False)
class ShearFlow:
    """
    Attributes:
        grid: Grid whose x2 nodes carry the profile.
        times: Sample times, shape (Nt + 1,).
        profiles: u1(t_n, x2), shape (Nt + 1, N2), zero on the wall.
        forcing_mid: f at the step midpoints, shape (Nt,).
    """

    grid: Grid
    times: np.ndarray
    profiles: np.ndarray
    forcing_mid: np.ndarray

    @property
    def dt(self) -> float:
        return float(self.times[1] - self.times[0])

    def velocity(self, n: int) -> VectorField:
        u1 = np.repeat(self.profiles[n][:, None], self.grid.N1, axis=1)
        return VectorField.from_arrays(self.grid, u1, np.zeros(self.grid.shape))


def shear_flow_solve(
    grid: Grid,
    forcing: Callable[[float], float],
    u0: np.ndarray,
    dt: float,
    t_end: float,
) -> ShearFlow:
    """
    Crank-Nicolson solve of d_t u1 - d2^2 u1 = f(t), u1 = 0 on the wall and
    d2 u1 = 0 at the top, the k = 0 case of the decaying Robin condition,
    imposed through the ghost node u_N = u_{N-2}.

    Args:
        grid: Grid; only its x2 nodes are used.
        forcing: f(t), e.g. a ForcingSeries.
        u0: Initial profile of length N2 with u0[0] = 0.
        dt: Step size.
        t_end: Final time, a whole number of steps.

    Raises:
        InvalidFieldError: If the profile is non-finite or slips at the wall.
    """
    u0 = np.asarray(u0, dtype=float)
    if u0.shape != (grid.N2,) or not np.all(np.isfinite(u0)):
        raise InvalidFieldError("initial shear profile must be finite with N2 entries")
    if abs(u0[0]) > 1e-10:
        raise InvalidFieldError(f"shear profile slips at the wall: u0[0]={u0[0]:.3e}")
    n_steps = int(round(t_end / dt))
    h, n = grid.h2, grid.N2 - 1

    def apply_L(u: np.ndarray) -> np.ndarray:
        """D2 on nodes 1..N2-1, ghost u_N = u_{N-2} at the top."""
        full = np.concatenate([[0.0], u, [u[-2]]])
        return (full[2:] - 2.0 * full[1:-1] + full[:-2]) / h**2

    ab = np.zeros((3, n))
    ab[0, 1:] = -0.5 * dt / h**2
    ab[1, :] = 1.0 + dt / h**2
    ab[2, :-1] = -0.5 * dt / h**2
    ab[2, -2] = -dt / h**2

    times = dt * np.arange(n_steps + 1)
    profiles = np.zeros((n_steps + 1, grid.N2))
    profiles[0] = u0
    f_mid = np.array([float(forcing(t + 0.5 * dt)) for t in times[:-1]])
    u = u0[1:].copy()
    for i in range(n_steps):
        rhs = u + 0.5 * dt * apply_L(u) + dt * f_mid[i]
        u = linalg.solve_banded((1, 1), ab, rhs)
        profiles[i + 1, 1:] = u
    logger.debug(f"Shear flow solved to t={times[-1]:.3e} in {n_steps} steps")
    return ShearFlow(grid=grid, times=times, profiles=profiles, forcing_mid=f_mid)


@dataclass(frozen=True)
class ResidualStats:
    """
    Attributes:
        r1_sup: sup |r1|.
        r2_sup: sup |r2|.
        r1_minus_f_sup: sup |r1 - f| (shear flows only; nan otherwise).
        samples: Number of time intervals evaluated.
    """

    r1_sup: float
    r2_sup: float
    r1_minus_f_sup: float
    samples: int

    @property
    def sup(self) -> float:
        return max(self.r1_sup, self.r2_sup)


def _momentum_terms(u: VectorField, omega: ScalarField) -> VectorField:
    """div(u (x) u) - Laplacian u + grad p_F + grad p_H."""
    a, b = u.u1, u.u2
    conv = VectorField(
        d_tangential(a * a) + d_vertical(a * b), d_tangential(a * b) + d_vertical(b * b)
    )
    lap = VectorField(laplacian(a), laplacian(b))
    grad_p = pressure_total_gradient(u, omega).grad_p
    return conv - lap + grad_p


def _interior(grid: Grid) -> slice:
    return slice(1, grid.N2 - 1)


def c2_residual(flow: Union[ShearFlow, Sequence[SimState]]) -> ResidualStats:
    """
    Residual r = d_t u + div(u (x) u) - Laplacian u + grad p_F + grad p_H,
    centered at half steps and evaluated on interior x2 rows.

    Args:
        flow: A ShearFlow, or a sequence of at least two SimStates (the
            snapshots of a vorticity run).
    """
    r1_sup = r2_sup = 0.0
    r1f_sup = 0.0 if isinstance(flow, ShearFlow) else float("nan")

    if isinstance(flow, ShearFlow):
        grid, rows, dt = flow.grid, _interior(flow.grid), flow.dt
        velocities = [flow.velocity(n) for n in range(len(flow.times))]
        terms = [
            _momentum_terms(u, ScalarField(grid, -d_vertical(u.u1).values))
            for u in velocities
        ]
        for n in range(len(flow.times) - 1):
            # interior rows of `laplacian` are the solver's three-point stencil
            du = (flow.profiles[n + 1] - flow.profiles[n]) / dt
            rest = 0.5 * (terms[n + 1] + terms[n])
            r1 = du[:, None] + rest.u1.values
            r2 = rest.u2.values
            r1_sup = max(r1_sup, float(np.max(np.abs(r1[rows]))))
            r2_sup = max(r2_sup, float(np.max(np.abs(r2[rows]))))
            r1f = float(np.max(np.abs(r1[rows] - flow.forcing_mid[n])))
            r1f_sup = max(r1f_sup, r1f)
        return ResidualStats(r1_sup, r2_sup, r1f_sup, len(flow.times) - 1)

    states = list(flow)
    if len(states) < 2:
        raise InvalidFieldError("c2_residual needs at least two snapshots")
    grid = states[0].grid
    rows = _interior(grid)
    terms = [_momentum_terms(s.u_cache, s.omega) for s in states]
    for n in range(len(states) - 1):
        dt = states[n + 1].t - states[n].t
        du = (states[n + 1].u_cache - states[n].u_cache) * (1.0 / dt)
        r = du + 0.5 * (terms[n + 1] + terms[n])
        r1_sup = max(r1_sup, float(np.max(np.abs(r.u1.values[rows]))))
        r2_sup = max(r2_sup, float(np.max(np.abs(r.u2.values[rows]))))
    return ResidualStats(r1_sup, r2_sup, r1f_sup, len(states) - 1)


__all__ = ["ShearFlow", "shear_flow_solve", "ResidualStats", "c2_residual"]
