"""
Mixed Fourier / finite-difference discretization of the truncated half plane.

The strip is periodic in x1 with period L1 and N1 samples, and truncated in
x2 to [origin, origin + H] with N2 uniformly spaced nodes. Field values are
stored as arrays of shape (N2, N1): rows are x2 levels, columns x1 samples.
Spectral coefficients are taken along x1 only and normalized so that a
constant field c has coefficient c at k = 0.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Union

import numpy as np

from core.errors import InvalidFieldError

WALL_TOLERANCE = 1e-10


@dataclass(frozen=True)
class Grid:
    """
    Pre-computed geometry and wavenumbers of the truncated strip.

    Parameters
    ----------
    L1 : float
        Period of the x1 truncation.
    N1 : int
        Number of x1 samples, a power of two, at least 8.
    H : float
        Height of the x2 truncation.
    N2 : int
        Number of x2 nodes, at least 9.
    origin : float
        x2 coordinate of the first node. 0 for the half plane; the doubled
        strip produced by `doubled()` starts at minus the parent height.
    """

    L1: float
    N1: int
    H: float
    N2: int
    origin: float = 0.0

    def __post_init__(self) -> None:
        if self.N1 < 8 or self.N1 & (self.N1 - 1):
            raise InvalidFieldError(f"N1 must be a power of two >= 8, got {self.N1}")
        if self.N2 < 9:
            raise InvalidFieldError(f"N2 must be >= 9, got {self.N2}")
        if not (self.L1 > 0 and self.H > 0):
            raise InvalidFieldError(
                f"L1 and H must be positive, got {self.L1}, {self.H}"
            )

        object.__setattr__(self, "h2", self.H / (self.N2 - 1))
        object.__setattr__(self, "dx1", self.L1 / self.N1)
        object.__setattr__(self, "x1", np.arange(self.N1) * self.dx1)
        object.__setattr__(self, "x2", self.origin + np.arange(self.N2) * self.h2)

        # Integer mode numbers in FFT order; index N1/2 is the Nyquist mode.
        m = np.fft.fftfreq(self.N1, d=1.0 / self.N1).astype(int)
        k = (2.0 * np.pi / self.L1) * m
        nyquist = np.zeros(self.N1, dtype=bool)
        nyquist[self.N1 // 2] = True
        object.__setattr__(self, "m", m)
        object.__setattr__(self, "mode_index", np.abs(m))
        object.__setattr__(self, "k", k)
        object.__setattr__(self, "nyquist", nyquist)
        object.__setattr__(self, "abs_k", np.abs(k))
        object.__setattr__(self, "ik", np.where(nyquist, 0.0, 1j * k))

        w = np.full(self.N2, self.h2)
        w[0] = w[-1] = 0.5 * self.h2
        object.__setattr__(self, "weights", w)

        kcut = (2.0 / 3.0) * np.max(np.abs(m))
        object.__setattr__(self, "dealias_mask", np.abs(m) < kcut)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.N2, self.N1)

    @property
    def n_modes(self) -> int:
        """Number of distinct |m| values, 0..N1/2."""
        return self.N1 // 2 + 1

    @property
    def mode_wavenumbers(self) -> np.ndarray:
        """|k| for each distinct |m| = 0..N1/2."""
        return (2.0 * np.pi / self.L1) * np.arange(self.n_modes)

    def mesh(self) -> tuple[np.ndarray, np.ndarray]:
        """Return (X1, X2) arrays shaped like a field."""
        return np.meshgrid(self.x1, self.x2, indexing="xy")

    def zeros(self) -> np.ndarray:
        return np.zeros(self.shape)

    def doubled(self) -> "Grid":
        """The strip [-H, H] with 2*N2 - 1 nodes sharing the x2 = 0 node."""
        if self.origin != 0.0:
            raise InvalidFieldError("only a half-plane grid can be doubled")
        return Grid(self.L1, self.N1, 2.0 * self.H, 2 * self.N2 - 1, origin=-self.H)

    def refined(self, vertical: int = 2, horizontal: int = 1) -> "Grid":
        """Grid with h2 divided by `vertical` and N1 multiplied by `horizontal`."""
        return Grid(
            self.L1,
            self.N1 * horizontal,
            self.H,
            vertical * (self.N2 - 1) + 1,
            origin=self.origin,
        )


def _frozen(values: np.ndarray, shape: tuple[int, ...], what: str) -> np.ndarray:
    arr = np.array(values, dtype=float)
    if arr.shape != shape:
        raise InvalidFieldError(f"{what} has shape {arr.shape}, expected {shape}")
    if not np.all(np.isfinite(arr)):
        raise InvalidFieldError(f"{what} contains non-finite values")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class ScalarField:
    """A real field sampled on the strip, immutable after construction."""

    grid: Grid
    values: np.ndarray

    def __post_init__(self) -> None:
        values = _frozen(self.values, self.grid.shape, "field")
        object.__setattr__(self, "values", values)

    @classmethod
    def zeros(cls, grid: Grid) -> "ScalarField":
        return cls(grid, grid.zeros())

    @classmethod
    def from_function(
        cls, grid: Grid, fn: Callable[[np.ndarray, np.ndarray], np.ndarray]
    ) -> "ScalarField":
        X1, X2 = grid.mesh()
        return cls(grid, np.broadcast_to(fn(X1, X2), grid.shape))

    @cached_property
    def spectral(self) -> np.ndarray:
        return to_spectral(self)

    def wall(self) -> "BoundaryTrace":
        """Restriction to the first x2 node."""
        return BoundaryTrace(self.grid, self.values[0])

    def sup(self) -> float:
        return float(np.max(np.abs(self.values)))

    def _coerce(self, other) -> np.ndarray | float:
        if isinstance(other, ScalarField):
            if other.grid != self.grid:
                raise InvalidFieldError("fields live on different grids")
            return other.values
        return other

    def __add__(self, other) -> "ScalarField":
        return ScalarField(self.grid, self.values + self._coerce(other))

    def __sub__(self, other) -> "ScalarField":
        return ScalarField(self.grid, self.values - self._coerce(other))

    def __mul__(self, other) -> "ScalarField":
        return ScalarField(self.grid, self.values * self._coerce(other))

    __radd__ = __add__
    __rmul__ = __mul__

    def __neg__(self) -> "ScalarField":
        return ScalarField(self.grid, -self.values)


@dataclass(frozen=True, eq=False)
class BoundaryTrace:
    """A real function of x1 on the wall."""

    grid: Grid
    values: np.ndarray

    def __post_init__(self) -> None:
        values = _frozen(self.values, (self.grid.N1,), "trace")
        object.__setattr__(self, "values", values)

    @classmethod
    def zeros(cls, grid: Grid) -> "BoundaryTrace":
        return cls(grid, np.zeros(grid.N1))

    @classmethod
    def from_function(
        cls, grid: Grid, fn: Callable[[np.ndarray], np.ndarray]
    ) -> "BoundaryTrace":
        return cls(grid, np.broadcast_to(fn(grid.x1), (grid.N1,)))

    @cached_property
    def spectral(self) -> np.ndarray:
        return to_spectral(self)

    def sup(self) -> float:
        return float(np.max(np.abs(self.values)))

    def __add__(self, other: "BoundaryTrace") -> "BoundaryTrace":
        return BoundaryTrace(self.grid, self.values + other.values)

    def __sub__(self, other: "BoundaryTrace") -> "BoundaryTrace":
        return BoundaryTrace(self.grid, self.values - other.values)

    def __mul__(self, scale: float) -> "BoundaryTrace":
        return BoundaryTrace(self.grid, self.values * scale)

    __rmul__ = __mul__


@dataclass(frozen=True, eq=False)
class VectorField:
    u1: ScalarField
    u2: ScalarField

    def __post_init__(self) -> None:
        if self.u1.grid != self.u2.grid:
            raise InvalidFieldError("vector components live on different grids")

    @property
    def grid(self) -> Grid:
        return self.u1.grid

    @classmethod
    def zeros(cls, grid: Grid) -> "VectorField":
        return cls(ScalarField.zeros(grid), ScalarField.zeros(grid))

    @classmethod
    def from_arrays(cls, grid: Grid, u1: np.ndarray, u2: np.ndarray) -> "VectorField":
        return cls(ScalarField(grid, u1), ScalarField(grid, u2))

    def sup(self) -> float:
        """Max over the grid of the Euclidean speed."""
        return float(np.max(np.hypot(self.u1.values, self.u2.values)))

    def __add__(self, other: "VectorField") -> "VectorField":
        return VectorField(self.u1 + other.u1, self.u2 + other.u2)

    def __sub__(self, other: "VectorField") -> "VectorField":
        return VectorField(self.u1 - other.u1, self.u2 - other.u2)

    def __mul__(self, scale: float) -> "VectorField":
        return VectorField(self.u1 * scale, self.u2 * scale)

    __rmul__ = __mul__


@dataclass(frozen=True, eq=False)
class TensorField:
    F11: ScalarField
    F12: ScalarField
    F21: ScalarField
    F22: ScalarField

    def __post_init__(self) -> None:
        if any(c.grid != self.F11.grid for c in (self.F12, self.F21, self.F22)):
            raise InvalidFieldError("tensor components live on different grids")

    @property
    def grid(self) -> Grid:
        return self.F11.grid

    @classmethod
    def outer(cls, u: VectorField, scale: float = 1.0) -> "TensorField":
        """scale * u (x) u. The off-diagonal entries share one array."""
        a, b = u.u1.values, u.u2.values
        off = ScalarField(u.grid, scale * a * b)
        return cls(
            ScalarField(u.grid, scale * a * a),
            off,
            off,
            ScalarField(u.grid, scale * b * b),
        )

    def is_symmetric(self) -> bool:
        return bool(np.array_equal(self.F12.values, self.F21.values))


Field = Union[ScalarField, BoundaryTrace]


def to_spectral(f: Field) -> np.ndarray:
    """
    Per-mode coefficients along x1.

    Args:
        f: A ScalarField (coefficients shaped (N2, N1)) or a BoundaryTrace
            (shaped (N1,)). Modes are in FFT order.

    Returns:
        Complex coefficients c with f(x1) = sum_m c_m exp(i k_m x1).

    Raises:
        InvalidFieldError: If the field holds non-finite values.
    """
    values = np.asarray(f.values)
    if not np.all(np.isfinite(values)):
        raise InvalidFieldError("cannot transform a non-finite field")
    return np.fft.fft(values, axis=-1) / f.grid.N1


def from_spectral(grid: Grid, coeffs: np.ndarray) -> Field:
    """
    Inverse of `to_spectral`. The imaginary residue is discarded.

    Returns a BoundaryTrace for 1D coefficient arrays, a ScalarField otherwise.
    """
    coeffs = np.asarray(coeffs)
    if not np.all(np.isfinite(coeffs)):
        raise InvalidFieldError("cannot invert non-finite coefficients")
    values = np.real(np.fft.ifft(coeffs * grid.N1, axis=-1))
    if coeffs.ndim == 1:
        return BoundaryTrace(grid, values)
    return ScalarField(grid, values)


def inner(a: ScalarField, b: ScalarField) -> float:
    """L2 inner product on the strip, trapezoid in x2 and rectangle in x1."""
    if a.grid != b.grid:
        raise InvalidFieldError("fields live on different grids")
    g = a.grid
    return float(g.dx1 * np.sum(g.weights[:, None] * a.values * b.values))


def l2_norm(f: ScalarField) -> float:
    return float(np.sqrt(inner(f, f)))


def spectral_l2_norm(f: ScalarField) -> float:
    """The same norm computed from coefficient sums (Parseval)."""
    g = f.grid
    return float(np.sqrt(g.L1 * np.sum(g.weights[:, None] * np.abs(f.spectral) ** 2)))


def extend_even_odd(u: VectorField) -> VectorField:
    """
    Extend a half-plane velocity to the doubled strip [-H, H].

    u1 is extended evenly and u2 oddly in x2, so that the extension of a
    divergence-free no-slip field stays divergence-free.

    Raises:
        InvalidFieldError: If u2 does not vanish on the wall.
    """
    g = u.grid
    wall = float(np.max(np.abs(u.u2.values[0])))
    if wall > WALL_TOLERANCE:
        raise InvalidFieldError(f"wall-normal trace {wall:.3e} is not zero")
    d = g.doubled()
    u1 = np.concatenate([u.u1.values[:0:-1], u.u1.values])
    u2 = np.concatenate([-u.u2.values[:0:-1], u.u2.values])
    u2[g.N2 - 1] = 0.0
    return VectorField.from_arrays(d, u1, u2)


def extend_odd(f: ScalarField) -> ScalarField:
    """Odd extension of a scalar (stream function, vorticity) to [-H, H]."""
    g = f.grid
    values = np.concatenate([-f.values[:0:-1], f.values])
    values[g.N2 - 1] = 0.0
    return ScalarField(g.doubled(), values)


def restrict_to_half(f: ScalarField | VectorField):
    """Restriction of a doubled-strip field to x2 >= 0."""
    if isinstance(f, VectorField):
        return VectorField(restrict_to_half(f.u1), restrict_to_half(f.u2))
    d = f.grid
    if d.origin >= 0.0:
        raise InvalidFieldError("field is not on a doubled strip")
    n = (d.N2 + 1) // 2
    half = Grid(d.L1, d.N1, d.H / 2.0, n)
    return ScalarField(half, f.values[n - 1 :])


__all__ = [
    "Grid",
    "ScalarField",
    "BoundaryTrace",
    "VectorField",
    "TensorField",
    "to_spectral",
    "from_spectral",
    "inner",
    "l2_norm",
    "spectral_l2_norm",
    "extend_even_odd",
    "extend_odd",
    "restrict_to_half",
]
