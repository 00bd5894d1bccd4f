"""
Fourier multipliers in x1 and finite differences in x2.

Odd multipliers (ik, -i sign k) and |k| zero the Nyquist mode so that
derivatives of real fields stay real. Even semigroup multipliers keep it.
"""

from __future__ import annotations

from typing import TypeVar

import numpy as np

from core.errors import InvalidFieldError
from fields.grid import (
    BoundaryTrace,
    Grid,
    ScalarField,
    VectorField,
    from_spectral,
)

F = TypeVar("F", ScalarField, BoundaryTrace)


def abs_k_multiplier(grid: Grid) -> np.ndarray:
    return np.where(grid.nyquist, 0.0, grid.abs_k)


def hilbert_multiplier(grid: Grid) -> np.ndarray:
    return np.where(grid.nyquist, 0.0, -1j * np.sign(grid.k))


def apply_multiplier(f: F, multiplier: np.ndarray) -> F:
    """Multiply every mode of `f` by `multiplier` (shape (N1,), FFT order)."""
    return from_spectral(f.grid, f.spectral * multiplier)


def frac_laplacian_half(f: F) -> F:
    """(-d1^2)^(1/2), the multiplier |k|. The mean is annihilated."""
    return apply_multiplier(f, abs_k_multiplier(f.grid))


def hilbert(f: F) -> F:
    """Periodic Hilbert transform, the multiplier -i sign(k)."""
    return apply_multiplier(f, hilbert_multiplier(f.grid))


def poisson_semigroup(g: BoundaryTrace, a: float) -> BoundaryTrace:
    """
    Harmonic extension of `g` evaluated at depth `a`, multiplier exp(-a|k|).

    Raises:
        InvalidFieldError: If the depth is negative.
    """
    if a < 0:
        raise InvalidFieldError(f"Poisson depth must be >= 0, got {a}")
    return apply_multiplier(g, np.exp(-a * g.grid.abs_k))


def d_tangential(f: F) -> F:
    return apply_multiplier(f, f.grid.ik)


def d_vertical(f: ScalarField) -> ScalarField:
    """
    d/dx2 by centered differences, one-sided second order at both ends.

    Exact for quadratics. On a doubled strip the x2 = 0 row is the mean of
    the one-sided stencils from either side, so an even or odd extension
    has the derivative of its half there.
    """
    g = f.grid
    out = np.gradient(f.values, g.h2, axis=0, edge_order=2)
    if g.origin < 0.0:
        w = int(round(-g.origin / g.h2))
        v = f.values
        above = -3.0 * v[w] + 4.0 * v[w + 1] - v[w + 2]
        below = 3.0 * v[w] - 4.0 * v[w - 1] + v[w - 2]
        out[w] = (above + below) / (4.0 * g.h2)
    return ScalarField(g, out)


def second_difference(values: np.ndarray, h: float) -> np.ndarray:
    """d^2/dx2^2 along axis 0: three-point interior, four-point one-sided ends."""
    out = np.empty_like(values)
    out[1:-1] = values[2:] - 2.0 * values[1:-1] + values[:-2]
    out[0] = 2.0 * values[0] - 5.0 * values[1] + 4.0 * values[2] - values[3]
    out[-1] = 2.0 * values[-1] - 5.0 * values[-2] + 4.0 * values[-3] - values[-4]
    return out / h**2


def d_vertical2(f: ScalarField) -> ScalarField:
    return ScalarField(f.grid, second_difference(f.values, f.grid.h2))


def laplacian(f: ScalarField) -> ScalarField:
    return apply_multiplier(f, -(f.grid.k**2)) + d_vertical2(f)


def gradient(f: ScalarField) -> VectorField:
    return VectorField(d_tangential(f), d_vertical(f))


def divergence(u: VectorField) -> ScalarField:
    return d_tangential(u.u1) + d_vertical(u.u2)


def curl(u: VectorField) -> ScalarField:
    """Scalar vorticity d1 u2 - d2 u1."""
    return d_tangential(u.u2) - d_vertical(u.u1)


def perp_gradient(psi: ScalarField) -> VectorField:
    """(d2 psi, -d1 psi), the velocity of a stream function."""
    return VectorField(d_vertical(psi), -d_tangential(psi))


__all__ = [
    "abs_k_multiplier",
    "hilbert_multiplier",
    "apply_multiplier",
    "frac_laplacian_half",
    "hilbert",
    "poisson_semigroup",
    "d_tangential",
    "d_vertical",
    "second_difference",
    "d_vertical2",
    "laplacian",
    "gradient",
    "divergence",
    "curl",
    "perp_gradient",
]
