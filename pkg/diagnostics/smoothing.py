"""
Short-time smoothing rates of a vorticity run started from rough data.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from core.errors import InvalidFieldError
from diagnostics.fits import SlopeFit, dyadic_times, slope_fit
from dynamics.state import RunHistory
from logging_config import get_logger

logger = get_logger("smoothing")

SLOPE_TOLERANCE = 0.15


@dataclass(frozen=True)
class SmoothingReport:
    """
    Raw fits of sup |grad^m u| and the compensated fits of t^{m/2} sup |grad^m u|
    (m = 1, 2) and t sup |d_t u|.
    """

    raw: dict[int, SlopeFit]
    compensated: dict[str, SlopeFit]
    maxima: dict[str, float] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        raw_ok = all(
            fit.exponent >= -m / 2.0 - SLOPE_TOLERANCE for m, fit in self.raw.items()
        )
        bounded = all(
            fit.exponent >= -SLOPE_TOLERANCE for fit in self.compensated.values()
        )
        return raw_ok and bounded

    def to_dict(self) -> dict:
        return {
            "raw": {f"grad{m}_u": fit.to_dict() for m, fit in self.raw.items()},
            "compensated": {k: fit.to_dict() for k, fit in self.compensated.items()},
            "maxima": self.maxima,
            "passed": self.passed,
        }


def _dyadic_records(times: np.ndarray, t_min: float, t_max: float) -> np.ndarray:
    """Indices of the records nearest to half-octave times in [t_min, t_max]."""
    targets = dyadic_times(t_min, t_max, per_octave=2)
    picks = np.unique([int(np.argmin(np.abs(times - target))) for target in targets])
    return picks[(times[picks] >= t_min * 0.999) & (times[picks] <= t_max * 1.001)]


def smoothing_rate_check(
    history: RunHistory, t_min: float = 1e-3, t_max: float = 1e-1
) -> SmoothingReport:
    """
    Fit the smoothing rates over [t_min, t_max] of a run started at t = 0.

    Raises:
        InvalidFieldError: If the history has too few records in the window.
    """
    times = np.asarray(history.times)
    idx = _dyadic_records(times, t_min, t_max)
    if idx.size < 8:
        raise InvalidFieldError(
            f"smoothing check needs >= 8 records in [{t_min}, {t_max}], got {idx.size}"
        )
    t = times[idx]
    grad = {
        1: np.asarray(history.sup_grad_u)[idx],
        2: np.asarray(history.sup_grad2_u)[idx],
    }
    dt_u = np.asarray(history.sup_dt_u)[idx]

    raw = {m: slope_fit(t, grad[m]) for m in (1, 2)}
    products = {f"t^{m / 2:g}*grad{m}_u": t ** (m / 2.0) * grad[m] for m in (1, 2)}
    products["t*dt_u"] = t * dt_u
    compensated = {name: slope_fit(t, series) for name, series in products.items()}
    maxima = {name: float(np.max(series)) for name, series in products.items()}

    report = SmoothingReport(raw=raw, compensated=compensated, maxima=maxima)
    logger.info(
        f"Smoothing slopes: m=1 {raw[1].exponent:.3f}, m=2 {raw[2].exponent:.3f}, "
        f"passed={report.passed}"
    )
    return report


__all__ = ["SmoothingReport", "smoothing_rate_check", "SLOPE_TOLERANCE"]
