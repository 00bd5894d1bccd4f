"""
Operator benches: time-scaling slopes of the semigroup operators and the
semigroup identities they must satisfy on the grid.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Callable, Optional, Sequence, Union

import numpy as np

from core.errors import InvalidFieldError
from diagnostics.fits import SlopeFit, slope_fit
from fields.grid import BoundaryTrace, Grid, ScalarField, TensorField, VectorField
from fields.spectral import d_tangential, d_vertical, divergence, frac_laplacian_half
from logging_config import get_logger
from operators.kernels import KernelTable, T_apply, eB_apply, eB_boundary_apply

logger = get_logger("benches")

TableProvider = Callable[[Grid, float], KernelTable]

EXPECTED_SLOPES: dict[str, tuple[float, float]] = {
    "identity": (0.0, 0.05),
    "T": (-0.5, 0.1),
    "abs_d1_T": (-1.0, 0.15),
    "T_d1": (-1.0, 0.15),
    "T_d2": (-1.0, 0.15),
    "abs_d1_T_d1": (-1.5, 0.15),
    "abs_d1_T_d2": (-1.5, 0.15),
}
REPORT_ONLY = ("abs_d1_T_divF",)
BOUNDARY_TOLERANCE = 0.15

_BOUNDARY_ID = re.compile(r"^boundary_k(\d)l(\d)$")


@dataclass(frozen=True)
class ScalingBenchResult:
    operator: str
    fit: SlopeFit
    expected: Optional[float]
    tolerance: Optional[float]
    norms: np.ndarray

    @property
    def passed(self) -> Optional[bool]:
        if self.expected is None:
            return None
        return self.fit.within(self.expected, self.tolerance)

    def to_dict(self) -> dict:
        return {
            "operator": self.operator,
            "fit": self.fit.to_dict(),
            "expected": self.expected,
            "tolerance": self.tolerance,
            "passed": self.passed,
        }


def expected_slope(operator_id: str) -> tuple[Optional[float], Optional[float]]:
    """(expected slope, tolerance); (None, None) for report-only operators."""
    if operator_id in EXPECTED_SLOPES:
        return EXPECTED_SLOPES[operator_id]
    if operator_id in REPORT_ONLY:
        return None, None
    match = _BOUNDARY_ID.match(operator_id)
    if match:
        k, l_ = int(match.group(1)), int(match.group(2))
        return -(1 + k + l_) / 2.0, BOUNDARY_TOLERANCE
    raise InvalidFieldError(f"Unknown bench operator: {operator_id}")


def smoothed_square_wave(x: np.ndarray, period: float, width: float) -> np.ndarray:
    """tanh-smoothed sign(sin(2 pi x / period)); width is the transition scale."""
    stretch = period / (2.0 * np.pi * width)
    return np.tanh(stretch * np.sin(2.0 * np.pi * x / period)) / np.tanh(stretch)


def rough_velocity(grid: Grid, layer: Optional[float] = None) -> VectorField:
    """
    Bounded bench velocity (s(x1) c(x2), 0): s a square wave resolved over one
    x1 cell, c a unit step down at x2 = layer resolved over one x2 cell and
    ramped up from zero over the first x2 cell.

    The field vanishes on the wall and jumps in both directions, so every
    operator in the table meets its worst-case rate.
    """
    layer = 0.25 * grid.H if layer is None else layer
    s = smoothed_square_wave(grid.x1, grid.L1, grid.dx1)
    c = 0.5 * (1.0 - np.tanh((grid.x2 - layer) / grid.h2))
    c *= np.tanh(grid.x2 / grid.h2)
    return VectorField.from_arrays(grid, np.outer(c, s), np.zeros(grid.shape))


def rough_trace(grid: Grid) -> BoundaryTrace:
    return BoundaryTrace(grid, smoothed_square_wave(grid.x1, grid.L1, grid.dx1))


def _apply(
    operator_id: str,
    t: float,
    data: Union[VectorField, BoundaryTrace],
    table: KernelTable,
) -> ScalarField:
    if operator_id == "T":
        return T_apply(t, data, table)
    if operator_id == "abs_d1_T":
        return frac_laplacian_half(T_apply(t, data, table))
    if operator_id in ("T_d1", "abs_d1_T_d1"):
        out = d_tangential(T_apply(t, data, table))
        return frac_laplacian_half(out) if operator_id == "abs_d1_T_d1" else out
    if operator_id in ("T_d2", "abs_d1_T_d2"):
        dv = VectorField(d_vertical(data.u1), d_vertical(data.u2))
        out = T_apply(t, dv, table)
        return frac_laplacian_half(out) if operator_id == "abs_d1_T_d2" else out
    if operator_id == "abs_d1_T_divF":
        F = TensorField.outer(data, scale=-1.0)
        div_F = VectorField(
            divergence(VectorField(F.F11, F.F12)), divergence(VectorField(F.F21, F.F22))
        )
        return frac_laplacian_half(T_apply(t, div_F, table))
    match = _BOUNDARY_ID.match(operator_id)
    if match:
        return eB_boundary_apply(
            t, data, table, k_order=int(match.group(1)), l_order=int(match.group(2))
        )
    raise InvalidFieldError(f"Unknown bench operator: {operator_id}")


def operator_scaling_bench(
    operator_id: str,
    data: Union[VectorField, BoundaryTrace],
    times: Sequence[float],
    tables: Optional[TableProvider] = None,
) -> ScalingBenchResult:
    """
    Fit sup |Op(t) data| against t.

    Args:
        operator_id: One of EXPECTED_SLOPES, REPORT_ONLY or boundary_k{k}l{l}.
        data: Velocity for the T family, wall trace for boundary sources.
            "identity" accepts either and reports its sup norm.
        times: Sample times (at least 8, usually dyadic).
        tables: KernelTable provider; defaults to building each table.

    Raises:
        InvalidFieldError: For unknown operators or unusable samples.
    """
    expected, tolerance = expected_slope(operator_id)
    tables = tables or KernelTable.build
    boundary = operator_id.startswith("boundary_")
    if boundary and not isinstance(data, BoundaryTrace):
        raise InvalidFieldError(f"{operator_id} needs a BoundaryTrace")
    if not boundary and operator_id != "identity" and not isinstance(data, VectorField):
        raise InvalidFieldError(f"{operator_id} needs a VectorField")

    norms = []
    for t in times:
        if operator_id == "identity":
            norms.append(data.sup())
            continue
        norms.append(_apply(operator_id, t, data, tables(data.grid, t)).sup())
    fit = slope_fit(times, norms)
    logger.info(
        f"Bench {operator_id}: slope {fit.exponent:.3f} (expected {expected}), "
        f"residual {fit.residual:.3e}"
    )
    return ScalingBenchResult(operator_id, fit, expected, tolerance, np.asarray(norms))


def wall_condition_residual(
    f: ScalarField, t: float, table: Optional[KernelTable] = None
) -> float:
    """
    sup_x1 |(d2 + |d1|) e^{tB} f| at the wall, relative to sup |e^{tB} f|.

    d2 is the one-sided grid derivative of the evolved field, so the
    residual measures how well the grid carries the wall condition.
    """
    table = table or KernelTable.build(f.grid, t)
    ef = eB_apply(t, f, table)
    residual = (d_vertical(ef) + frac_laplacian_half(ef)).wall().sup()
    return residual / max(ef.sup(), np.finfo(float).tiny)


def semigroup_defect(
    f: ScalarField,
    t: float,
    s: float,
    tables: Optional[TableProvider] = None,
) -> float:
    """sup |e^{(t+s)B} f - e^{tB} e^{sB} f| / sup |e^{(t+s)B} f|."""
    tables = tables or KernelTable.build
    grid = f.grid
    combined = eB_apply(t + s, f, tables(grid, t + s))
    composed = eB_apply(t, eB_apply(s, f, tables(grid, s)), tables(grid, t))
    return (combined - composed).sup() / max(combined.sup(), np.finfo(float).tiny)


def semigroup_compatibility(
    f: ScalarField, times: Sequence[float], tables: Optional[TableProvider] = None
) -> SlopeFit:
    """Fit sup |e^{tB} f - f| against t; compatibility gives order >= 1/2."""
    tables = tables or KernelTable.build
    norms = [(eB_apply(t, f, tables(f.grid, t)) - f).sup() for t in times]
    return slope_fit(times, norms)


__all__ = [
    "EXPECTED_SLOPES",
    "REPORT_ONLY",
    "ScalingBenchResult",
    "expected_slope",
    "rough_velocity",
    "rough_trace",
    "smoothed_square_wave",
    "operator_scaling_bench",
    "wall_condition_residual",
    "semigroup_defect",
    "semigroup_compatibility",
]
