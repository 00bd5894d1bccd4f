"""
Per-mode kernels of the half-plane vorticity semigroup.

Ghat(t, k, z) = exp(-k^2 t) (4 pi t)^(-1/2) exp(-z^2 / (4t)) is the x1-Fourier
transform of the 2D heat kernel. The boundary correction GammaHat is the
sigma-integral 2 int_t^inf exp(-k^2 s) (-k^2 + |k| d/dz) (4 pi s)^(-1/2)
exp(-z^2 / (4s)) ds, which has the closed form
-|k| exp(-|k| z) erfc(|k| sqrt(t) - z / (2 sqrt(t))). The closed form feeds the
tables; `gamma_hat_quadrature` is its validation oracle.

e^{tB} acts per mode as a vertical convolution against
Ghat(x2 - y2) + Ghat(x2 + y2) + GammaHat(x2 + y2), integrated with trapezoid
weights over [0, H]. T(t) is the transpose of the kernel derivatives under
the same weights, so the duality identity holds to roundoff.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Literal, NamedTuple, Optional, Sequence

import numpy as np
from scipy import integrate, special

from core.errors import InvalidFieldError, QuadratureError
from fields.grid import (
    BoundaryTrace,
    Grid,
    ScalarField,
    VectorField,
    from_spectral,
    inner,
)
from fields.spectral import d_tangential
from logging_config import get_logger

logger = get_logger("kernels")

QUADRATURE_TOLERANCE = 1e-9
# sigma_max = t + TAIL_DECAYS / k^2, so the neglected tail carries exp(-TAIL_DECAYS).
TAIL_DECAYS = 40.0


def _check_time(t: float, allow_zero: bool = False) -> None:
    if not np.isfinite(t) or t < 0 or (t == 0 and not allow_zero):
        relation = ">=" if allow_zero else ">"
        raise InvalidFieldError(f"kernel time must be {relation} 0, got {t}")


def gaussian_hat(t: float, k, z):
    """x1-transformed heat kernel. Positive, even in z, z-integral exp(-k^2 t)."""
    _check_time(t)
    k = np.asarray(k, dtype=float)
    z = np.asarray(z, dtype=float)
    return np.exp(-(k**2) * t - z**2 / (4.0 * t)) / np.sqrt(4.0 * np.pi * t)


def gaussian_hat_dz(t: float, k, z):
    return -np.asarray(z, dtype=float) / (2.0 * t) * gaussian_hat(t, k, z)


def gamma_hat(t: float, k, z):
    """
    Closed form of the boundary correction kernel.

    Args:
        t: Time, t >= 0. At t = 0 the limit -2|k|exp(-|k|z) is returned for
            z > 0 and -|k| on the wall.
        k: Wavenumber(s).
        z: Vertical offset(s) x2 + y2 >= 0.

    Returns:
        GammaHat(t, k, z); exactly 0 where k = 0.
    """
    _check_time(t, allow_zero=True)
    kappa = np.abs(np.asarray(k, dtype=float))
    z = np.asarray(z, dtype=float)
    if t == 0:
        return np.where(z > 0, -2.0 * kappa * np.exp(-kappa * z), -kappa)
    alpha = kappa * np.sqrt(t) - z / (2.0 * np.sqrt(t))
    return -kappa * np.exp(-kappa * z) * special.erfc(alpha)


def gamma_hat_dz(t: float, k, z):
    """d/dz of `gamma_hat` for t > 0."""
    _check_time(t)
    kappa = np.abs(np.asarray(k, dtype=float))
    z = np.asarray(z, dtype=float)
    alpha = kappa * np.sqrt(t) - z / (2.0 * np.sqrt(t))
    return kappa**2 * np.exp(-kappa * z) * special.erfc(alpha) - kappa / np.sqrt(
        np.pi * t
    ) * np.exp(-(kappa**2) * t - z**2 / (4.0 * t))


class QuadratureResult(NamedTuple):
    value: float
    error: float
    nodes: int


def _gamma_integrand_log(s: float, t: float, k: float, z: float) -> float:
    """Integrand in s = log(sigma / t), including the Jacobian sigma."""
    sigma = t * np.exp(s)
    kappa = abs(k)
    heat = np.exp(-(k**2) * sigma - z**2 / (4.0 * sigma)) / np.sqrt(4.0 * np.pi * sigma)
    return 2.0 * heat * (-(k**2) - kappa * z / (2.0 * sigma)) * sigma


def gamma_tail_bound(k: float, z: float, sigma_max: float) -> float:
    """Bound on the part of the sigma-integral beyond sigma_max."""
    kappa = abs(k)
    return (
        2.0
        * (k**2 + kappa * z / (2.0 * sigma_max))
        / np.sqrt(4.0 * np.pi * sigma_max)
        * np.exp(-(k**2) * sigma_max)
        / k**2
    )


def gamma_hat_quadrature(
    t: float,
    k: float,
    z: float,
    method: Literal["adaptive", "gauss"] = "adaptive",
    nodes: int = 64,
    tol: float = QUADRATURE_TOLERANCE,
) -> QuadratureResult:
    """
    Evaluate GammaHat directly from its sigma-integral.

    The integral runs over s = log(sigma / t) from 0 to log(sigma_max / t)
    with sigma_max = t + 40 / k^2; the remainder is bounded analytically.

    Args:
        t: Time, t > 0.
        k: Wavenumber.
        z: Offset x2 + y2.
        method: "adaptive" (scipy quad) or "gauss" (fixed Gauss-Legendre).
        nodes: Node count of the Gauss-Legendre rule.
        tol: Required bound on quadrature error plus tail, relative to
            max(1, |value|).

    Raises:
        QuadratureError: If the error estimate exceeds `tol`.
    """
    _check_time(t)
    if k == 0:
        return QuadratureResult(0.0, 0.0, 0)
    sigma_max = t + TAIL_DECAYS / k**2
    s_max = float(np.log(sigma_max / t))
    tail = gamma_tail_bound(k, z, sigma_max)

    if method == "adaptive":
        # quad appends a message to the tuple when it flags a problem
        value, abserr, info = integrate.quad(
            _gamma_integrand_log,
            0.0,
            s_max,
            args=(t, k, z),
            epsabs=1e-14,
            epsrel=1e-13,
            limit=400,
            full_output=1,
        )[:3]
        used = int(info["neval"])
    elif method == "gauss":
        x, w = np.polynomial.legendre.leggauss(nodes)
        s = 0.5 * s_max * (x + 1.0)
        value = 0.5 * s_max * float(np.sum(w * _gamma_integrand_log(s, t, k, z)))
        abserr = 0.0
        used = nodes
    else:
        raise ValueError(f"Unknown quadrature method: {method}")

    error = abserr + tail
    if error > tol * max(1.0, abs(value)):
        raise QuadratureError(
            f"GammaHat quadrature at t={t:.3e}, k={k:.3e}, z={z:.3e}", error
        )
    return QuadratureResult(float(value), float(error), used)


@dataclass(frozen=True, eq=False)
class KernelTable:
    """
    Kernel values for one grid and one time.

    Ghat and dGhat_dz are tabulated on offsets |x2 - y2| = d h2 and GammaHat
    and dGammaHat_dz on sums x2 + y2 = d h2, for d = 0..2(N2-1) and for each
    distinct |m| = 0..N1/2 (arrays shaped (N1/2 + 1, 2 N2 - 1)).
    """

    grid: Grid
    t: float
    Ghat: np.ndarray
    dGhat_dz: np.ndarray
    GammaHat: np.ndarray
    dGammaHat_dz: np.ndarray
    node_count: int
    tail_cutoff: float
    estimated_error: float

    @classmethod
    def build(cls, grid: Grid, t: float, spot_checks: int = 4) -> "KernelTable":
        """
        Tabulate the closed forms and spot-check GammaHat against quadrature.

        Args:
            grid: Half-plane grid.
            t: Time, t > 0.
            spot_checks: Number of (mode, offset) entries validated against
                adaptive quadrature. 0 skips validation.

        Raises:
            QuadratureError: If a spot check disagrees beyond tolerance.
        """
        _check_time(t)
        kabs = grid.mode_wavenumbers[:, None]
        z = grid.h2 * np.arange(2 * grid.N2 - 1)[None, :]
        gamma = gamma_hat(t, kabs, z)

        worst = 0.0
        if spot_checks:
            modes = np.unique(np.linspace(1, max(1, grid.n_modes // 4), 2).astype(int))
            offsets = np.unique(np.linspace(0, grid.N2 - 1, 2).astype(int))
            checks = [(m, d) for m in modes for d in offsets][:spot_checks]
            for m, d in checks:
                oracle = gamma_hat_quadrature(t, float(kabs[m, 0]), float(z[0, d]))
                diff = abs(oracle.value - gamma[m, d]) + oracle.error
                worst = max(worst, diff / max(1.0, abs(oracle.value)))
            if worst > QUADRATURE_TOLERANCE:
                raise QuadratureError("KernelTable spot check failed", worst)

        logger.debug(
            f"Built KernelTable t={t:.3e} on N1={grid.N1}, N2={grid.N2} "
            f"(spot-check error {worst:.2e})"
        )
        return cls(
            grid=grid,
            t=t,
            Ghat=gaussian_hat(t, kabs, z),
            dGhat_dz=gaussian_hat_dz(t, kabs, z),
            GammaHat=gamma,
            dGammaHat_dz=gamma_hat_dz(t, kabs, z),
            node_count=grid.N2,
            tail_cutoff=TAIL_DECAYS,
            estimated_error=worst,
        )

    @cached_property
    def _indices(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        i, j = np.indices((self.grid.N2, self.grid.N2))
        return np.abs(i - j), i + j, np.sign(i - j)

    @cached_property
    def propagator(self) -> np.ndarray:
        """A[m, i, j] = Ghat(|i-j|) + Ghat(i+j) + GammaHat(i+j)."""
        diff, total, _ = self._indices
        return self.Ghat[:, diff] + self.Ghat[:, total] + self.GammaHat[:, total]

    @cached_property
    def propagator_dx2(self) -> np.ndarray:
        """x2-derivative of `propagator` in its first argument."""
        diff, total, sign = self._indices
        return (
            sign * self.dGhat_dz[:, diff]
            + self.dGhat_dz[:, total]
            + self.dGammaHat_dz[:, total]
        )

    @cached_property
    def boundary_profile(self) -> np.ndarray:
        """(2 Ghat + GammaHat)(t, k, x2), shape (N1/2 + 1, N2)."""
        n = self.grid.N2
        return 2.0 * self.Ghat[:, :n] + self.GammaHat[:, :n]

    @cached_property
    def boundary_profile_dx2(self) -> np.ndarray:
        n = self.grid.N2
        return 2.0 * self.dGhat_dz[:, :n] + self.dGammaHat_dz[:, :n]


def _table_for(grid: Grid, t: float, table: Optional[KernelTable]) -> KernelTable:
    _check_time(t)
    if table is None:
        return KernelTable.build(grid, t)
    if table.grid != grid or table.t != t:
        raise InvalidFieldError(f"KernelTable is for t={table.t}, not t={t}")
    return table


def _apply_per_mode(
    grid: Grid, mats: np.ndarray, coeffs: np.ndarray, transpose: bool = False
) -> np.ndarray:
    """out[m] = mats[|m|] @ coeffs[m] (or its transpose) for coeffs shaped (N1, N2)."""
    out = np.empty_like(coeffs)
    for mi in range(grid.n_modes):
        cols = grid.mode_index == mi
        mat = mats[mi] if transpose else mats[mi].T
        out[cols] = coeffs[cols] @ mat
    return out


def eB_apply(
    t: float,
    f: ScalarField,
    table: Optional[KernelTable] = None,
    derivative: Optional[Literal["x1", "x2"]] = None,
) -> ScalarField:
    """
    Apply the half-plane vorticity semigroup e^{tB} to `f`.

    Args:
        t: Time, t > 0.
        f: Field on the half-plane grid.
        table: KernelTable for (f.grid, t); built on the fly when omitted.
        derivative: Return d1 or d2 of e^{tB} f instead, with d2 taken on the
            kernel.

    Raises:
        InvalidFieldError: If t <= 0 or the table does not match.
    """
    grid = f.grid
    table = _table_for(grid, t, table)
    weighted = (f.spectral * grid.weights[:, None]).T
    mats = table.propagator_dx2 if derivative == "x2" else table.propagator
    out = _apply_per_mode(grid, mats, weighted).T
    if derivative == "x1":
        out = out * grid.ik
    return from_spectral(grid, out)


def eB_boundary_apply(
    t: float,
    g: BoundaryTrace,
    table: Optional[KernelTable] = None,
    k_order: int = 0,
    l_order: int = 0,
    j_order: int = 0,
) -> ScalarField:
    """
    e^{tB}(g delta_wall) with optional derivatives.

    Per mode the result is (2 Ghat + GammaHat)(t, k, x2) g_hat(k), multiplied by
    |k|^k_order (ik)^l_order and differentiated j_order (0 or 1) times in x2.
    """
    if j_order not in (0, 1):
        raise ValueError("only j_order 0 or 1 is tabulated")
    grid = g.grid
    table = _table_for(grid, t, table)
    profile = table.boundary_profile_dx2 if j_order else table.boundary_profile
    mult = g.spectral.copy()
    if k_order:
        mult = mult * np.where(grid.nyquist, 0.0, grid.abs_k) ** k_order
    if l_order:
        mult = mult * grid.ik**l_order
    return from_spectral(grid, profile[grid.mode_index].T * mult[None, :])


def T_apply(
    t: float, v: VectorField, table: Optional[KernelTable] = None
) -> ScalarField:
    """
    Vorticity at time t of the linear Stokes evolution of the velocity v.

    Defined by duality: <T(t)v, f> = <v1, d2 e^{tB} f> - <v2, d1 e^{tB} f>
    for every test field f. Per mode T_hat = D^T W v1_hat + ik A^T W v2_hat,
    with A the propagator, D its x2-derivative and W the trapezoid weights.
    """
    grid = v.grid
    table = _table_for(grid, t, table)
    w = grid.weights[:, None]
    c1 = (v.u1.spectral * w).T
    c2 = (v.u2.spectral * w).T
    out = _apply_per_mode(grid, table.propagator_dx2, c1, transpose=True)
    tangential = _apply_per_mode(grid, table.propagator, c2, transpose=True)
    out += grid.ik[:, None] * tangential
    return from_spectral(grid, out.T)


def duality_residual(
    t: float, v: VectorField, f: ScalarField, table: Optional[KernelTable] = None
) -> float:
    """Relative defect of the duality identity defining T(t)."""
    table = _table_for(f.grid, t, table)
    lhs = inner(T_apply(t, v, table), f)
    e_f = eB_apply(t, f, table)
    rhs = inner(v.u1, eB_apply(t, f, table, derivative="x2")) - inner(
        v.u2, d_tangential(e_f)
    )
    scale = max(abs(lhs), abs(rhs), np.finfo(float).tiny)
    return abs(lhs - rhs) / scale


@dataclass(frozen=True)
class BoundCheckReport:
    max_ratio: float
    ratios: np.ndarray
    calibration: float
    modes: int


def kernel_value(
    t: float,
    x: tuple[float, float],
    y: tuple[float, float],
    L1: float,
    orders: tuple[int, int, int] = (0, 0, 0),
    component: Literal["full", "heat"] = "full",
    n_modes: Optional[int] = None,
) -> float:
    """
    Physical kernel (-d1^2)^(k/2) d1^l d2^j K(t, x, y) of e^{tB}, periodic in x1.

    The mode sum runs far enough that exp(-k^2 t) falls below exp(-40).
    """
    k_ord, l_ord, j_ord = orders
    if j_ord not in (0, 1):
        raise ValueError("only j = 0 or 1 is supported")
    needed = int(np.ceil(L1 * np.sqrt(TAIL_DECAYS / t) / (2.0 * np.pi)))
    n = max(needed, n_modes or 0)
    m = np.arange(-n, n + 1)
    k = 2.0 * np.pi * m / L1
    (x1, x2), (y1, y2) = x, y
    diff, total = x2 - y2, x2 + y2
    if j_ord:
        hat = gaussian_hat_dz(t, k, diff) + gaussian_hat_dz(t, k, total)
        if component == "full":
            hat = hat + gamma_hat_dz(t, k, total)
    else:
        hat = gaussian_hat(t, k, diff) + gaussian_hat(t, k, total)
        if component == "full":
            hat = hat + gamma_hat(t, k, total)
    mult = np.abs(k) ** k_ord * (1j * k) ** l_ord
    value = np.sum(mult * hat * np.exp(1j * k * (x1 - y1))) / L1
    return float(np.real(value))


def _bound_shape(
    t: float, dx1: float, dx2: float, orders: tuple[int, int, int]
) -> float:
    k_ord, l_ord, j_ord = orders
    X1 = abs(dx1) / np.sqrt(t)
    X2 = abs(dx2) / np.sqrt(t)
    p = 2 + k_ord + l_ord
    denom = 1.0 + X1**p / np.log(np.e + X1**2) + X2 ** (p + j_ord)
    return t ** (-(k_ord + l_ord + 2) / 2.0) / denom


def kernel_pointwise_bound_check(
    t: float,
    samples: Sequence[tuple[tuple[float, float], tuple[float, float]]],
    L1: float,
    orders: tuple[int, int, int] = (0, 0, 0),
    component: Literal["full", "heat"] = "full",
    constant: Optional[float] = None,
    n_modes: Optional[int] = None,
) -> BoundCheckReport:
    """
    Compare |K(t,x,y)| with C t^{-(k+l+2)/2}(1 + |X1|^{2+k+l}/log(e+|X1|^2)
    + |X2|^{2+k+l+j})^{-1}, X = (x - y)/sqrt(t), X1 taken periodically.

    Args:
        t: Time.
        samples: (x, y) point pairs.
        L1: x1 period.
        orders: Derivative orders (k, l, j).
        component: "heat" drops the GammaHat correction.
        constant: C. When omitted it is calibrated so the ratio is 1 at
            x = y = (0, 0).
        n_modes: Lower bound on the number of modes in the kernel sum.

    Raises:
        InvalidFieldError: If calibration is requested at a zero kernel value.
    """
    _check_time(t)
    if constant is None:
        origin = (0.0, 0.0)
        at_origin = abs(
            kernel_value(t, origin, origin, L1, orders, component, n_modes)
        )
        if at_origin == 0.0:
            raise InvalidFieldError(
                "kernel vanishes at the calibration point; pass a constant"
            )
        constant = at_origin / _bound_shape(t, 0.0, 0.0, orders)

    ratios = []
    for x, y in samples:
        value = kernel_value(t, x, y, L1, orders, component, n_modes)
        dx1 = (x[0] - y[0] + 0.5 * L1) % L1 - 0.5 * L1
        shape = _bound_shape(t, dx1, x[1] - y[1], orders)
        ratios.append(abs(value) / (constant * shape))
    ratios = np.asarray(ratios)
    return BoundCheckReport(
        max_ratio=float(np.max(ratios)) if ratios.size else 0.0,
        ratios=ratios,
        calibration=float(constant),
        modes=int(np.ceil(L1 * np.sqrt(TAIL_DECAYS / t) / (2.0 * np.pi))),
    )


__all__ = [
    "gaussian_hat",
    "gaussian_hat_dz",
    "gamma_hat",
    "gamma_hat_dz",
    "gamma_hat_quadrature",
    "gamma_tail_bound",
    "QuadratureResult",
    "KernelTable",
    "eB_apply",
    "eB_boundary_apply",
    "T_apply",
    "duality_residual",
    "kernel_value",
    "kernel_pointwise_bound_check",
    "BoundCheckReport",
]
