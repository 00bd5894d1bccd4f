"""
Pressure constituents of the mild-solution closure p = p_F + p_H.

p_F solves Laplacian p_F = div div F with d2 p_F = 0 on the wall, F = -u (x) u.
p_H is harmonic with d2 p_H = d1 g on the wall, g the wall vorticity, and is
only ever needed through its gradient.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import linalg

from core.errors import SingularSystemError
from fields.grid import (
    BoundaryTrace,
    Grid,
    ScalarField,
    TensorField,
    VectorField,
    extend_even_odd,
    extend_odd,
    from_spectral,
)
from fields.spectral import (
    abs_k_multiplier,
    d_tangential,
    d_vertical,
    divergence,
    gradient,
    hilbert_multiplier,
    laplacian,
    second_difference,
)
from logging_config import get_logger

logger = get_logger("pressure")


@dataclass(frozen=True, eq=False)
class PressureParts:
    pF: ScalarField
    grad_pF: VectorField
    grad_pH: VectorField
    wall_d1pF: BoundaryTrace

    @property
    def grad_p(self) -> VectorField:
        return self.grad_pF + self.grad_pH


def div_div_hat(F: TensorField) -> np.ndarray:
    """Per-mode coefficients of d_i d_j F_ij."""
    g = F.grid
    h = g.h2
    ik = g.ik[None, :]

    def d2(c: np.ndarray) -> np.ndarray:
        return np.gradient(c, h, axis=0, edge_order=2)

    return (
        -(g.k[None, :] ** 2) * F.F11.spectral
        + ik * d2(F.F12.spectral)
        + ik * d2(F.F21.spectral)
        + second_difference(F.F22.spectral, h)
    )


def _neumann_robin_modes(grid: Grid, rhs: np.ndarray) -> np.ndarray:
    """
    Solve (D2 - k^2) p = rhs per mode |m| >= 1 with d2 p = 0 at the wall and
    d2 p + |k| p = 0 at the top, both imposed through ghost nodes.
    """
    h = grid.h2
    n = grid.N2
    p = np.zeros_like(rhs)
    for mi in range(1, grid.n_modes):
        if mi == grid.N1 // 2:
            continue
        kappa = grid.mode_wavenumbers[mi]
        ab = np.zeros((3, n))
        ab[0, 1:] = 1.0 / h**2
        ab[1, :] = -2.0 / h**2 - kappa**2
        ab[2, :-1] = 1.0 / h**2
        ab[0, 1] = 2.0 / h**2
        ab[2, -2] = 2.0 / h**2
        ab[1, -1] = -(2.0 + 2.0 * h * kappa) / h**2 - kappa**2
        cols = grid.mode_index == mi
        try:
            p[:, cols] = linalg.solve_banded((1, 1), ab, rhs[:, cols])
        except linalg.LinAlgError as e:
            raise SingularSystemError(f"pressure solve failed at |m|={mi}") from e
    return p


def pF_solve(F: TensorField) -> PressureParts:
    """
    Neumann-Poisson pressure driven by the tensor F.

    The k = 0 mode is the F22 mean-mode profile shifted to zero vertical mean;
    the Nyquist mode is zero. grad_pH is returned as zero.

    Returns:
        PressureParts with pF, its gradient, and d1 pF on the wall.
    """
    grid = F.grid
    p_hat = _neumann_robin_modes(grid, div_div_hat(F))
    mean_profile = F.F22.spectral[:, 0]
    p_hat[:, 0] = mean_profile - np.sum(grid.weights * mean_profile) / grid.H
    pF = from_spectral(grid, p_hat)
    grad = gradient(pF)
    return PressureParts(
        pF=pF,
        grad_pF=grad,
        grad_pH=VectorField.zeros(grid),
        wall_d1pF=grad.u1.wall(),
    )


def pH_potential(g: BoundaryTrace) -> ScalarField:
    """Harmonic potential with gradient `pH_gradient(g)`: Poisson extension of H g."""
    grid = g.grid
    decay = np.exp(-np.outer(grid.x2, grid.abs_k))
    return from_spectral(grid, decay * (hilbert_multiplier(grid) * g.spectral)[None, :])


def pH_gradient(g: BoundaryTrace) -> VectorField:
    """
    Gradient of the harmonic pressure with wall data g.

    Per mode d1 p_H = |k| exp(-|k| x2) g_hat and d2 p_H = ik exp(-|k| x2) g_hat, so
    the wall limits are |d1| g and d1 g exactly.
    """
    grid = g.grid
    decay = np.exp(-np.outer(grid.x2, grid.abs_k)) * g.spectral[None, :]
    return VectorField(
        from_spectral(grid, decay * abs_k_multiplier(grid)),
        from_spectral(grid, decay * grid.ik),
    )


def harmonic_weighted_bound(g: BoundaryTrace) -> float:
    """sup x2 |grad p_H| / sup |g|, the measured constant of the weighted estimate."""
    grad = pH_gradient(g)
    speed = np.hypot(grad.u1.values, grad.u2.values)
    weighted = np.max(g.grid.x2[:, None] * speed)
    return float(weighted / max(g.sup(), np.finfo(float).tiny))


def pressure_total_gradient(u: VectorField, omega: ScalarField) -> PressureParts:
    """Assemble p_F from F = -u (x) u and p_H from the wall vorticity."""
    parts = pF_solve(TensorField.outer(u, scale=-1.0))
    return PressureParts(
        pF=parts.pF,
        grad_pF=parts.grad_pF,
        grad_pH=pH_gradient(omega.wall()),
        wall_d1pF=parts.wall_d1pF,
    )


def doubled_identity_residual(u: VectorField, omega: ScalarField) -> float:
    """
    sup |div div F~ + div(u~perp omega~) + Laplacian |u~|^2 / 2| on the doubled
    strip, F~ = -u~ (x) u~, u~ the even/odd extension and omega~ the odd one.

    The wall row is excluded: omega~ jumps there.
    """
    ue = extend_even_odd(u)
    we = extend_odd(omega)
    F = TensorField.outer(ue, scale=-1.0)
    lhs = (
        d_tangential(d_tangential(F.F11))
        + d_tangential(d_vertical(F.F12)) * 2.0
        + ScalarField(F.grid, second_difference(F.F22.values, F.grid.h2))
    )
    flux = VectorField(-ue.u2 * we, ue.u1 * we)
    energy = ScalarField(ue.grid, 0.5 * (ue.u1.values**2 + ue.u2.values**2))
    rhs = -divergence(flux) - laplacian(energy)
    interior = np.abs(ue.grid.x2) > 0.5 * ue.grid.h2
    return float(np.max(np.abs((lhs - rhs).values[interior])))


__all__ = [
    "PressureParts",
    "div_div_hat",
    "pF_solve",
    "pH_potential",
    "pH_gradient",
    "harmonic_weighted_bound",
    "pressure_total_gradient",
    "doubled_identity_residual",
]
