"""
Velocity from vorticity on the truncated half plane, and the wall trace
functional b = int_0^H P(y2) * omega dy2 with P the Poisson kernel.
"""

from __future__ import annotations

import warnings

import numpy as np
from scipy import integrate, linalg

from core.errors import (
    DomainTruncationWarning,
    InvalidFieldError,
    SingularSystemError,
)
from fields.grid import BoundaryTrace, Grid, ScalarField, VectorField, from_spectral
from logging_config import get_logger

logger = get_logger("biot_savart")

LEAKAGE_FRACTION = 0.9
LEAKAGE_TOLERANCE = 1e-6


def top_leakage(omega: ScalarField) -> float:
    """sup |omega| over x2 > 0.9 H."""
    g = omega.grid
    band = g.x2 - g.origin > LEAKAGE_FRACTION * g.H
    return float(np.max(np.abs(omega.values[band])))


def _warn_on_leakage(omega: ScalarField, tolerance: float) -> None:
    leak = top_leakage(omega) * omega.grid.H
    if leak > tolerance:
        warnings.warn(
            f"vorticity leakage {leak:.3e} at the top of the strip "
            f"exceeds {tolerance:.1e}",
            DomainTruncationWarning,
            stacklevel=3,
        )


def _stream_modes(grid: Grid, omega_hat: np.ndarray) -> np.ndarray:
    """
    Solve (D2 - k^2) psi = -omega per mode with psi(0) = 0 and the decaying
    Robin branch d2 psi + |k| psi = 0 at the top. Returns psi_hat (N2, N1).
    """
    h = grid.h2
    n = grid.N2 - 1
    psi = np.zeros_like(omega_hat)
    for mi in range(1, grid.n_modes):
        kappa = grid.mode_wavenumbers[mi]
        ab = np.zeros((3, n))
        ab[0, 1:] = 1.0 / h**2
        ab[1, :] = -2.0 / h**2 - kappa**2
        ab[2, :-1] = 1.0 / h**2
        # top row through the ghost node psi_N = psi_{N-2} - 2 h kappa psi_{N-1}
        ab[2, -2] = 2.0 / h**2
        ab[1, -1] = -(2.0 + 2.0 * h * kappa) / h**2 - kappa**2
        cols = grid.mode_index == mi
        try:
            psi[1:, cols] = linalg.solve_banded((1, 1), ab, -omega_hat[1:, cols])
        except linalg.LinAlgError as e:
            raise SingularSystemError(
                f"stream-function solve failed at |m|={mi}"
            ) from e
    return psi


def stream_function(omega: ScalarField) -> ScalarField:
    """Stream function psi with -Laplacian psi = omega and psi = 0 on the wall.

    The mean mode is returned as zero; its velocity is set by `biot_savart`.
    """
    return from_spectral(omega.grid, _stream_modes(omega.grid, omega.spectral))


def biot_savart(
    omega: ScalarField, leakage_tolerance: float = LEAKAGE_TOLERANCE
) -> VectorField:
    """
    Reconstruct the velocity whose vorticity is `omega`.

    Per mode k != 0 the stream function is solved from (d2^2 - k^2) psi = -omega
    and u = (d2 psi, -ik psi). The mean mode carries u1(x2) = int_{x2}^H omega.

    Args:
        omega: Vorticity on the half-plane grid.
        leakage_tolerance: Threshold on sup_{x2>0.9H}|omega| * H above which a
            DomainTruncationWarning is issued.

    Returns:
        Velocity with u2 = 0 on the wall exactly.
    """
    grid = omega.grid
    _warn_on_leakage(omega, leakage_tolerance)
    omega_hat = omega.spectral
    psi = _stream_modes(grid, omega_hat)

    u1_hat = np.gradient(psi, grid.h2, axis=0, edge_order=2)
    top_down = integrate.cumulative_trapezoid(
        omega_hat[::-1, 0], dx=grid.h2, initial=0.0
    )
    u1_hat[:, 0] = top_down[::-1]
    u2_hat = -grid.ik[None, :] * psi
    return VectorField(from_spectral(grid, u1_hat), from_spectral(grid, u2_hat))


def trace_functional(omega: ScalarField) -> BoundaryTrace:
    """
    b_hat(k) = int_0^H exp(-|k| y2) omega_hat(k, y2) dy2 by the trapezoid rule.

    For the vorticity of a no-slip velocity b vanishes; for nonnegative,
    nontrivial vorticity it is strictly positive.
    """
    grid = omega.grid
    decay = np.exp(-np.outer(grid.x2, grid.abs_k))
    b_hat = np.sum(grid.weights[:, None] * decay * omega.spectral, axis=0)
    return from_spectral(grid, b_hat)


def periodic_poisson_kernel(x1: np.ndarray, y2: np.ndarray, L1: float) -> np.ndarray:
    """sum over periods of (1/pi) y2 / (x1^2 + y2^2), for y2 > 0."""
    s = 2.0 * np.pi * y2 / L1
    return np.sinh(s) / (np.cosh(s) - np.cos(2.0 * np.pi * x1 / L1)) / L1


def trace_functional_direct(omega: ScalarField) -> BoundaryTrace:
    """
    Physical-space evaluation of the trace functional with the closed-form
    periodized Poisson kernel. The wall row acts as a delta.
    """
    grid = omega.grid
    dx = grid.x1[:, None] - grid.x1[None, :]
    b = grid.weights[0] * omega.values[0].copy()
    for j in range(1, grid.N2):
        P = periodic_poisson_kernel(dx, grid.x2[j], grid.L1)
        b += grid.weights[j] * grid.dx1 * (P @ omega.values[j])
    return BoundaryTrace(grid, b)


def trace_lower_bound(omega: ScalarField) -> float:
    """
    Lower bound on min b for nonnegative omega from the heaviest single cell.

    Each off-wall cell contributes at least w_j dx1 omega P_min(x2_j), where
    P_min(y) = tanh(pi y / L1) / L1 is the smallest value of the periodized
    Poisson kernel at height y.
    """
    grid = omega.grid
    if np.min(omega.values) < 0:
        raise InvalidFieldError("trace lower bound requires nonnegative vorticity")
    pmin = np.tanh(np.pi * grid.x2[1:] / grid.L1) / grid.L1
    cells = grid.weights[1:, None] * grid.dx1 * omega.values[1:] * pmin[:, None]
    return float(np.max(cells))


__all__ = [
    "top_leakage",
    "stream_function",
    "biot_savart",
    "trace_functional",
    "trace_functional_direct",
    "trace_lower_bound",
    "periodic_poisson_kernel",
]
