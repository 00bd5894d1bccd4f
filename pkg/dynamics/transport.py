"""
Fundamental solution of the drift-diffusion equation d_t w - Laplacian w + u.grad w = 0
on the doubled strip [-H, H], with u the even/odd extension of a half-plane
drift.

Nodes of the doubled grid are treated as cell centers, so the strip walls
sit half a cell outside the first and last node. Each step advects in
conservative flux form (MC-limited, dimension split, sub-cycled) and then
diffuses by convolution with the sampled heat kernel, periodized in x1 and
reflected at the walls. Both substeps preserve mass exactly and keep w
nonnegative.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from core.errors import CFLViolationError, InvalidFieldError
from fields.grid import Grid
from logging_config import get_logger

logger = get_logger("transport")

SWEEP_COURANT = 0.25
KERNEL_IMAGES = 2
# sampled heat kernels narrower than this many cells alias visibly in the tails
KERNEL_WIDTH_CELLS = 2.0


@dataclass(frozen=True)
class TypeOneAmplitude:
    """
    Drift speed M (T - tau)^{-1/2}, capped.

    Attributes:
        M: Type-I constant.
        T: Blow-up time of the uncapped profile.
        cap: Largest speed the grid can carry.
    """

    M: float
    T: float
    cap: float

    def __call__(self, tau: float) -> float:
        remaining = self.T - tau
        if remaining <= 0.0:
            return self.cap
        return min(self.M / np.sqrt(remaining), self.cap)


class StreamDrift:
    """
    Divergence-free drift amplitude(tau) * u_shape, u_shape = perp-grad of a
    stream function sampled at cell corners and normalized to unit maximal
    face speed.

    The stream function must be odd in x2 so that the drift is the even/odd
    extension of a no-slip half-plane field.
    """

    def __init__(
        self,
        stream: Callable[[np.ndarray, np.ndarray], np.ndarray],
        amplitude: Callable[[float], float],
    ):
        self.stream = stream
        self.amplitude = amplitude
        self._faces: dict[Grid, tuple[np.ndarray, np.ndarray]] = {}

    @classmethod
    def cellular(
        cls, amplitude: Callable[[float], float], L1: float, width: float
    ) -> "StreamDrift":
        """psi = sin(2 pi x1 / L1) x2 exp(-x2^2 / width^2)."""

        def stream(X1: np.ndarray, X2: np.ndarray) -> np.ndarray:
            return np.sin(2.0 * np.pi * X1 / L1) * X2 * np.exp(-(X2**2) / width**2)

        return cls(stream, amplitude)

    def faces(self, grid: Grid) -> tuple[np.ndarray, np.ndarray]:
        """
        Unit-amplitude face velocities.

        Returns:
            (u1, u2): u1 of shape (N2, N1) on the x1 face right of each cell,
            u2 of shape (N2 + 1, N1) on the x2 faces; wall faces carry 0.
        """
        if grid not in self._faces:
            x1c = grid.x1 + 0.5 * grid.dx1
            x2c = grid.x2[0] - 0.5 * grid.h2 + grid.h2 * np.arange(grid.N2 + 1)
            X1, X2 = np.meshgrid(x1c, x2c, indexing="xy")
            psi = self.stream(X1, X2)
            u1 = np.diff(psi, axis=0) / grid.h2
            u2 = -(psi - np.roll(psi, 1, axis=1)) / grid.dx1
            u2[0] = 0.0
            u2[-1] = 0.0
            scale = max(np.max(np.abs(u1)), np.max(np.abs(u2)))
            if scale == 0.0:
                raise InvalidFieldError("drift stream function is constant")
            self._faces[grid] = (u1 / scale, u2 / scale)
        return self._faces[grid]


@dataclass(frozen=True, eq=False)
class FundamentalSolution:
    """
    Attributes:
        grid: The doubled strip.
        y: Source point (y1, y2).
        s: Source time.
        t: Final time.
        w: Density at t, shape (N2, N1) on `grid`.
        initial_variance: Variance per direction of the mollified delta.
        times: Record times.
        mass_history: Total mass per record.
        min_history: min w per record.
        sup_history: max w per record.
        drift_times: Midpoints of the advection substeps.
        drift_speeds: ||u||_inf used on each substep.
        drift_steps: Length of each substep.
    """

    grid: Grid
    y: tuple[float, float]
    s: float
    t: float
    w: np.ndarray
    initial_variance: float
    times: np.ndarray
    mass_history: np.ndarray
    min_history: np.ndarray
    sup_history: np.ndarray
    drift_times: np.ndarray
    drift_speeds: np.ndarray
    drift_steps: np.ndarray

    @property
    def drift_integral(self) -> float:
        return float(np.sum(self.drift_speeds * self.drift_steps))

    @property
    def mass_drift(self) -> float:
        return float(np.max(np.abs(self.mass_history - self.mass_history[0])))

    def neumann_restriction(self) -> np.ndarray:
        """w(x2) + w(-x2) on x2 >= 0: the even-reflected half-plane evolution."""
        n = (self.grid.N2 + 1) // 2
        upper = self.w[n - 1 :].copy()
        upper[1:] += self.w[: n - 1][::-1]
        return upper


def _mass(grid: Grid, w: np.ndarray) -> float:
    return float(np.sum(w) * grid.dx1 * grid.h2)


def gaussian_initial(grid: Grid, y: tuple[float, float], sigma0: float) -> np.ndarray:
    """Sampled Gaussian of width sigma0 at y, periodized in x1, unit discrete mass."""
    X1, X2 = grid.mesh()
    d1 = (X1 - y[0] + 0.5 * grid.L1) % grid.L1 - 0.5 * grid.L1
    w = np.exp(-(d1**2 + (X2 - y[1]) ** 2) / (2.0 * sigma0**2))
    return w / _mass(grid, w)


def _periodic_kernel(x: np.ndarray, period: float, variance: float) -> np.ndarray:
    diff = x[:, None] - x[None, :]
    K = np.zeros_like(diff)
    for n in range(-KERNEL_IMAGES, KERNEL_IMAGES + 1):
        K += np.exp(-((diff + n * period) ** 2) / (2.0 * variance))
    return K / K.sum(axis=0)


def _reflected_kernel(
    x: np.ndarray, lower: float, upper: float, variance: float
) -> np.ndarray:
    xi, xj = x[:, None], x[None, :]
    K = (
        np.exp(-((xi - xj) ** 2) / (2.0 * variance))
        + np.exp(-((xi - (2.0 * upper - xj)) ** 2) / (2.0 * variance))
        + np.exp(-((xi - (2.0 * lower - xj)) ** 2) / (2.0 * variance))
    )
    return K / K.sum(axis=0)


def _mc_slope(w: np.ndarray, periodic: bool) -> np.ndarray:
    """Monotonized-central limited slopes along the last axis."""
    if periodic:
        left = w - np.roll(w, 1, axis=-1)
        right = np.roll(w, -1, axis=-1) - w
    else:
        pad = np.pad(w, [(0, 0)] * (w.ndim - 1) + [(1, 1)], mode="edge")
        left = pad[..., 1:-1] - pad[..., :-2]
        right = pad[..., 2:] - pad[..., 1:-1]
    mag = np.minimum(
        np.minimum(2.0 * np.abs(left), 2.0 * np.abs(right)), 0.5 * np.abs(left + right)
    )
    return np.where(left * right > 0.0, np.sign(left) * mag, 0.0)


def _sweep(
    w: np.ndarray, v: np.ndarray, dt: float, dx: float, periodic: bool
) -> np.ndarray:
    """
    One flux-form advection sweep along the last axis.

    `v` holds face velocities: for periodic sweeps the face right of each
    cell (same shape as w), otherwise all faces including the two walls
    (one more entry than w).
    """
    sigma = _mc_slope(w, periodic)
    if periodic:
        v_face = v
        w_left, s_left = w, sigma
        w_right, s_right = np.roll(w, -1, axis=-1), np.roll(sigma, -1, axis=-1)
    else:
        v_face = v[..., 1:-1]
        w_left, s_left = w[..., :-1], sigma[..., :-1]
        w_right, s_right = w[..., 1:], sigma[..., 1:]
    nu = v_face * dt / dx
    upwind = np.where(
        v_face > 0.0,
        w_left + 0.5 * (1.0 - nu) * s_left,
        w_right - 0.5 * (1.0 + nu) * s_right,
    )
    flux = v_face * upwind
    if periodic:
        return w - (dt / dx) * (flux - np.roll(flux, 1, axis=-1))
    zero = np.zeros(flux.shape[:-1] + (1,))
    flux = np.concatenate([zero, flux, zero], axis=-1)
    return w - (dt / dx) * np.diff(flux, axis=-1)


def heat_transport_fundamental(
    grid: Grid,
    s: float,
    y: tuple[float, float],
    t_end: float,
    dt: float,
    drift: Optional[StreamDrift] = None,
    sigma0: Optional[float] = None,
    max_substeps: int = 2000,
    record_every: int = 1,
) -> FundamentalSolution:
    """
    Evolve a mollified delta at (s, y) to t_end.

    Args:
        grid: Half-plane grid; the solve runs on its doubled strip.
        s: Source time.
        y: Source point on the doubled strip (y2 may be negative).
        t_end: Final time.
        dt: Diffusion step; the kernel width sqrt(2 dt) must span two cells.
        drift: Optional drift; None gives the pure heat kernel.
        sigma0: Initial width, at least two cells (default two cells).
        max_substeps: Advection sub-cycles allowed per step.
        record_every: Record mass and extrema every this many steps.

    Raises:
        InvalidFieldError: For invalid times, widths or step sizes.
        CFLViolationError: If the drift needs more than `max_substeps`.
    """
    doubled = grid.doubled() if grid.origin == 0.0 else grid
    cell = max(doubled.dx1, doubled.h2)
    if t_end <= s:
        raise InvalidFieldError(f"t_end={t_end} must exceed the source time s={s}")
    sigma0 = 2.0 * cell if sigma0 is None else sigma0
    if sigma0 < 2.0 * cell - 1e-12:
        raise InvalidFieldError(
            f"initial width {sigma0:.3e} is below two cells ({2 * cell:.3e})"
        )
    if 2.0 * dt < (KERNEL_WIDTH_CELLS * cell) ** 2:
        raise InvalidFieldError(
            f"dt={dt:.3e} under-resolves the heat kernel on cells of {cell:.3e}"
        )
    n_steps = int(round((t_end - s) / dt))
    if abs(s + n_steps * dt - t_end) > 1e-12 * max(1.0, abs(t_end)):
        raise InvalidFieldError(
            f"t_end - s={t_end - s} is not a whole number of steps dt={dt}"
        )

    h = doubled.h2
    K1 = _periodic_kernel(doubled.x1, doubled.L1, 2.0 * dt)
    K2 = _reflected_kernel(
        doubled.x2, doubled.x2[0] - 0.5 * h, doubled.x2[-1] + 0.5 * h, 2.0 * dt
    )
    w = gaussian_initial(doubled, y, sigma0)
    faces = drift.faces(doubled) if drift is not None else None
    min_cell = min(doubled.dx1, h)

    times, mass = [s], [_mass(doubled, w)]
    w_min, w_max = [float(w.min())], [float(w.max())]
    d_times: list[float] = []
    d_speeds: list[float] = []
    d_steps: list[float] = []
    logger.debug(
        f"Transport solve on N1={doubled.N1}, N2={doubled.N2}: {n_steps} steps"
    )

    for n in range(n_steps):
        tau = s + n * dt
        if faces is not None:
            peak = max(drift.amplitude(tau + frac * dt) for frac in (0.0, 0.5, 1.0))
            n_sub = max(1, int(np.ceil(peak * dt / (SWEEP_COURANT * min_cell))))
            if n_sub > max_substeps:
                bound = max_substeps * SWEEP_COURANT * min_cell / peak
                raise CFLViolationError(dt, bound)
            dt_sub = dt / n_sub
            u1, u2 = faces
            for j in range(n_sub):
                mid = tau + (j + 0.5) * dt_sub
                a = float(drift.amplitude(mid))
                if j % 2 == 0:
                    w = _sweep(w, a * u1, dt_sub, doubled.dx1, periodic=True)
                    w = _sweep(w.T, a * u2.T, dt_sub, h, periodic=False).T
                else:
                    w = _sweep(w.T, a * u2.T, dt_sub, h, periodic=False).T
                    w = _sweep(w, a * u1, dt_sub, doubled.dx1, periodic=True)
                d_times.append(mid)
                d_speeds.append(a)
                d_steps.append(dt_sub)
        w = K2 @ w @ K1.T
        if not np.all(np.isfinite(w)):
            raise InvalidFieldError(
                f"transport density became non-finite at t={tau + dt:.4e}"
            )
        if (n + 1) % record_every == 0 or n + 1 == n_steps:
            times.append(tau + dt)
            mass.append(_mass(doubled, w))
            w_min.append(float(w.min()))
            w_max.append(float(w.max()))

    logger.debug(
        f"Transport done: mass drift {abs(mass[-1] - mass[0]):.2e}, "
        f"min {min(w_min):.2e}"
    )
    return FundamentalSolution(
        grid=doubled,
        y=(float(y[0]), float(y[1])),
        s=s,
        t=t_end,
        w=w,
        initial_variance=sigma0**2,
        times=np.array(times),
        mass_history=np.array(mass),
        min_history=np.array(w_min),
        sup_history=np.array(w_max),
        drift_times=np.array(d_times),
        drift_speeds=np.array(d_speeds),
        drift_steps=np.array(d_steps),
    )


__all__ = [
    "TypeOneAmplitude",
    "StreamDrift",
    "FundamentalSolution",
    "gaussian_initial",
    "heat_transport_fundamental",
]
