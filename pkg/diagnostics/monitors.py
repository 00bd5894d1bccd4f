"""
Monitors over run histories and snapshots: conserved wall trace, positivity,
top-of-strip leakage, vertical decay and raw temporal decay series.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from core.errors import InvalidFieldError
from diagnostics.fits import SlopeFit, slope_fit
from dynamics.state import RunHistory, SimState
from fields.grid import ScalarField, TensorField
from fields.spectral import d_vertical, frac_laplacian_half
from logging_config import get_logger
from operators.biot_savart import LEAKAGE_FRACTION, top_leakage
from operators.pressure import pF_solve

logger = get_logger("monitors")

POSITIVITY_TOLERANCE = 1e-10


@dataclass(frozen=True)
class TraceDriftReport:
    """
    Attributes:
        max_drift: max_t sup_x1 |b(t) - b(t0)|.
        final_drift: The same at the last record.
        t_of_max: Time at which max_drift is attained.
        records: Number of records inspected.
    """

    max_drift: float
    final_drift: float
    t_of_max: float
    records: int

    def to_dict(self) -> dict:
        return asdict(self)


def conserved_trace_monitor(history: RunHistory) -> TraceDriftReport:
    """Drift of the wall trace functional of vorticity across a run."""
    drift = history.trace_drift()
    if drift.size == 0:
        return TraceDriftReport(0.0, 0.0, 0.0, 0)
    worst = int(np.argmax(drift))
    return TraceDriftReport(
        max_drift=float(drift[worst]),
        final_drift=float(drift[-1]),
        t_of_max=float(history.times[worst]),
        records=len(history),
    )


def positivity_monitor(
    omega: ScalarField, tolerance: float = POSITIVITY_TOLERANCE
) -> bool:
    return bool(np.min(omega.values) >= -tolerance)


def top_leakage_monitor(history: RunHistory) -> float:
    """Largest sup_{x2 > 0.9H} |omega| seen over a run."""
    return float(max(history.leakage, default=0.0))


def spatial_decay_fit(omega: ScalarField) -> SlopeFit:
    """
    Fit sup_x1 |omega(., x2)| against x2 over [H/2, 0.9H): the exponent
    estimates -(1 + theta) for vorticity decaying like x2^{-(1+theta)}.

    Raises:
        InvalidFieldError: If the profile vanishes somewhere in the window.
    """
    g = omega.grid
    height = g.x2 - g.origin
    window = (height >= 0.5 * g.H) & (height < LEAKAGE_FRACTION * g.H)
    profile = np.max(np.abs(omega.values[window]), axis=1)
    if np.any(profile <= 0):
        raise InvalidFieldError("vorticity profile vanishes inside the decay window")
    return slope_fit(height[window], profile)


def temporal_decay_series(history: RunHistory) -> dict[str, np.ndarray]:
    """Raw ||omega(t)||_inf and ||d1 omega(t)||_inf series; reported, never gated."""
    return {
        "t": np.asarray(history.times),
        "sup_omega": np.asarray(history.sup_omega),
        "sup_d1_omega": np.asarray(history.sup_d1_omega),
    }


def vorticity_wall_residual(state: SimState) -> float:
    """sup_x1 |d2 omega + |d1| omega + d1 p_F| on the wall for an evolved state."""
    omega = state.omega
    d1pF = pF_solve(TensorField.outer(state.u_cache, scale=-1.0)).wall_d1pF
    residual = d_vertical(omega).wall() + frac_laplacian_half(omega.wall()) + d1pF
    return residual.sup()


def leakage_fraction(omega: ScalarField) -> float:
    """Top leakage relative to sup |omega|."""
    peak = omega.sup()
    return top_leakage(omega) / peak if peak > 0 else 0.0


__all__ = [
    "TraceDriftReport",
    "conserved_trace_monitor",
    "positivity_monitor",
    "top_leakage_monitor",
    "spatial_decay_fit",
    "temporal_decay_series",
    "vorticity_wall_residual",
    "leakage_fraction",
]
