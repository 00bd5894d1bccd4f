"""
Least-squares power-law fits in log-log space.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import Optional, Sequence

import numpy as np

from core.errors import InvalidFieldError

MIN_SAMPLES = 8
RESIDUAL_GATE = 0.05


@dataclass(frozen=True)
class SlopeFit:
    """
    value ~ exp(intercept) * t**exponent.

    Attributes:
        exponent: Fitted slope in log-log space.
        intercept: Fitted log-prefactor.
        residual: Root-mean-square log-space residual.
        t_range: (min t, max t) of the samples.
        samples: Number of samples used.
    """

    exponent: float
    intercept: float
    residual: float
    t_range: tuple[float, float]
    samples: int

    def within(
        self, expected: float, tolerance: float, residual_gate: float = RESIDUAL_GATE
    ) -> bool:
        """True when the slope lies in expected +- tolerance and the residual passes."""
        close = abs(self.exponent - expected) <= tolerance
        return close and self.residual <= residual_gate

    def to_dict(self) -> dict:
        return asdict(self)


def dyadic_times(t_min: float, t_max: float, per_octave: int = 1) -> np.ndarray:
    """Times t_min * 2**(j / per_octave) up to t_max inclusive."""
    if not 0.0 < t_min < t_max:
        raise InvalidFieldError(f"need 0 < t_min < t_max, got {t_min}, {t_max}")
    count = int(np.floor(per_octave * np.log2(t_max / t_min) + 1e-9)) + 1
    return t_min * 2.0 ** (np.arange(count) / per_octave)


def slope_fit(
    t: Sequence[float],
    values: Sequence[float],
    min_samples: int = MIN_SAMPLES,
    weights: Optional[Sequence[float]] = None,
) -> SlopeFit:
    """
    Fit log(value) = exponent * log(t) + intercept.

    Raises:
        InvalidFieldError: For fewer than `min_samples` samples, nonpositive
            or non-finite values or times.
    """
    t = np.asarray(t, dtype=float)
    v = np.asarray(values, dtype=float)
    if t.shape != v.shape or t.ndim != 1:
        raise InvalidFieldError("slope_fit needs matching 1D series")
    if t.size < min_samples:
        raise InvalidFieldError(
            f"slope_fit needs >= {min_samples} samples, got {t.size}"
        )
    if not (np.all(np.isfinite(t)) and np.all(np.isfinite(v))):
        raise InvalidFieldError("slope_fit got non-finite samples")
    if np.any(t <= 0) or np.any(v <= 0):
        raise InvalidFieldError("slope_fit needs positive times and values")

    x, y = np.log(t), np.log(v)
    exponent, intercept = np.polyfit(x, y, 1, w=weights)
    resid = y - (exponent * x + intercept)
    return SlopeFit(
        exponent=float(exponent),
        intercept=float(intercept),
        residual=float(np.sqrt(np.mean(resid**2))),
        t_range=(float(t.min()), float(t.max())),
        samples=int(t.size),
    )


def observed_order(h: Sequence[float], errors: Sequence[float]) -> float:
    """Convergence order: least-squares slope of log e against log h."""
    fit = slope_fit(h, errors, min_samples=2)
    return fit.exponent


__all__ = ["SlopeFit", "slope_fit", "dyadic_times", "observed_order", "RESIDUAL_GATE"]
