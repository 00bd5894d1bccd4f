"""
Initial data for the scenarios.

Stream-function presets are built from the compactly supported radial bump
b(s) = (1 - s^2)^6, whose Laplacian is known in closed form, so the sampled
vorticity is exact at the nodes.
"""

from __future__ import annotations

import numpy as np

from core.config import InitialConfig
from core.errors import InvalidFieldError
from fields.grid import Grid, ScalarField, inner
from fields.spectral import laplacian


def radial_bump(
    X1: np.ndarray, X2: np.ndarray, center: tuple[float, float], width: float
) -> tuple[np.ndarray, np.ndarray]:
    """
    b(|x - c| / width) and its Laplacian.

    Returns:
        (phi, lap_phi) sampled on (X1, X2).
    """
    s2 = ((X1 - center[0]) ** 2 + (X2 - center[1]) ** 2) / width**2
    inside = s2 < 1.0
    q = np.where(inside, 1.0 - s2, 0.0)
    phi = q**6
    lap = (-24.0 * q**5 + 120.0 * s2 * q**4) / width**2
    return phi, np.where(inside, lap, 0.0)


def _check_support(grid: Grid, cfg: InitialConfig, spread: float) -> None:
    if cfg.height - cfg.width <= 0.0 or cfg.height + cfg.width >= grid.H:
        raise InvalidFieldError(
            f"bump at height {cfg.height} with width {cfg.width} "
            f"leaves the strip (0, {grid.H})"
        )
    if 2.0 * (spread + cfg.width) >= grid.L1:
        raise InvalidFieldError(
            f"bumps of width {cfg.width} overlap their periodic images"
        )


def vortex_pair(grid: Grid, cfg: InitialConfig) -> tuple[ScalarField, ScalarField]:
    """
    Counter-rotating pair psi = A (b(x - c+) - b(x - c-)), c+- = (L1/2 +- w, height).

    Returns:
        (psi, omega) with omega = -Laplacian psi.
    """
    _check_support(grid, cfg, cfg.width)
    X1, X2 = grid.mesh()
    mid = 0.5 * grid.L1
    phi_a, lap_a = radial_bump(X1, X2, (mid - cfg.width, cfg.height), cfg.width)
    phi_b, lap_b = radial_bump(X1, X2, (mid + cfg.width, cfg.height), cfg.width)
    psi = cfg.amplitude * (phi_a - phi_b)
    omega = -cfg.amplitude * (lap_a - lap_b)
    return ScalarField(grid, psi), ScalarField(grid, omega)


def blob(grid: Grid, cfg: InitialConfig) -> ScalarField:
    """Nonnegative vorticity bump of unit mass (times amplitude) at (L1/2, height)."""
    _check_support(grid, cfg, 0.0)
    X1, X2 = grid.mesh()
    phi, _ = radial_bump(X1, X2, (0.5 * grid.L1, cfg.height), cfg.width)
    field = ScalarField(grid, phi)
    mass = inner(field, ScalarField(grid, np.ones(grid.shape)))
    return field * (cfg.amplitude / mass)


def band_limited(grid: Grid, cfg: InitialConfig) -> tuple[ScalarField, ScalarField]:
    """
    Rough no-slip data:
    psi = x2^2 exp(-x2^2 / l^2) sum_m (a_m cos + b_m sin)(k_m x1) / m
    with seeded normal coefficients over modes 1..cfg.modes, l = cfg.height.
    psi and d2 psi vanish on the wall.

    Returns:
        (psi, omega) with omega the discrete -Laplacian of psi, scaled so that
        sup |omega| equals the amplitude.
    """
    if cfg.modes >= grid.N1 // 3:
        raise InvalidFieldError(
            f"{cfg.modes} modes exceed the dealiased band of N1={grid.N1}"
        )
    rng = np.random.default_rng(cfg.seed)
    a = rng.standard_normal(cfg.modes)
    b = rng.standard_normal(cfg.modes)
    m = np.arange(1, cfg.modes + 1)
    k = 2.0 * np.pi * m / grid.L1
    phase = np.outer(k, grid.x1)
    series = (a / m) @ np.cos(phase) + (b / m) @ np.sin(phase)
    envelope = grid.x2**2 * np.exp(-(grid.x2**2) / cfg.height**2)
    psi = ScalarField(grid, np.outer(envelope, series))
    omega = -laplacian(psi)
    scale = cfg.amplitude / omega.sup()
    return psi * scale, omega * scale


def shear_profile(grid: Grid, cfg: InitialConfig) -> np.ndarray:
    """u1(0, x2) = A sin(pi x2 / H); it vanishes on the wall and at the top."""
    return cfg.amplitude * np.sin(np.pi * grid.x2 / grid.H)


def initial_vorticity(grid: Grid, cfg: InitialConfig) -> ScalarField:
    """Vorticity of the configured preset."""
    if cfg.preset == "zero":
        return ScalarField.zeros(grid)
    if cfg.preset == "vortex_pair":
        return vortex_pair(grid, cfg)[1]
    if cfg.preset == "blob":
        return blob(grid, cfg)
    if cfg.preset == "band_limited":
        return band_limited(grid, cfg)[1]
    if cfg.preset == "shear":
        profile = shear_profile(grid, cfg)
        omega = -np.gradient(profile, grid.h2, edge_order=2)
        return ScalarField(grid, np.repeat(omega[:, None], grid.N1, axis=1))
    raise InvalidFieldError(f"Unknown initial preset: {cfg.preset}")


__all__ = [
    "radial_bump",
    "vortex_pair",
    "blob",
    "band_limited",
    "shear_profile",
    "initial_vorticity",
]
