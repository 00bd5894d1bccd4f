"""
Gaussian upper bounds for the drift-diffusion fundamental solution.

The envelope is

    C1 / tau * exp(-C2 ((|x - y| - D)_+)^2 / tau),  tau = t - s + sigma0^2 / 2,

summed over the periodic x1 images and the wall reflections of the solver,
with D the recorded drift integral of ||u||_inf. The initial width enters
tau so that the pure heat kernel with C1 = 1/(4 pi), C2 = 1/4 is matched
exactly.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from core.errors import InvalidFieldError
from diagnostics.fits import SlopeFit, slope_fit
from dynamics.transport import FundamentalSolution
from logging_config import get_logger

logger = get_logger("envelope")

SUPPORT_FLOOR = 1e-8
DRIFT_AGREEMENT = 1e-10


@dataclass(frozen=True)
class EnvelopeParams:
    """
    Attributes:
        M: Type-I constant of the drift (0 for the pure heat control).
        C1: Prefactor, > 0.
        C2: Exponential rate, > 0.
        drift_integral: int_s^t ||u||_inf, the shift of the envelope.
    """

    M: float
    C1: float
    C2: float
    drift_integral: float

    def __post_init__(self) -> None:
        if self.C1 <= 0 or self.C2 <= 0:
            raise InvalidFieldError(
                f"envelope constants must be positive: {self.C1}, {self.C2}"
            )
        if self.drift_integral < 0:
            raise InvalidFieldError("drift integral must be nonnegative")

    @classmethod
    def heat(cls, drift_integral: float = 0.0) -> "EnvelopeParams":
        """Heat-kernel constants C1 = 1/(4 pi), C2 = 1/4."""
        return cls(
            M=0.0, C1=1.0 / (4.0 * np.pi), C2=0.25, drift_integral=drift_integral
        )

    @classmethod
    def from_type_one(cls, M: float, drift_integral: float) -> "EnvelopeParams":
        """C1 = exp(16 M^2) / (4 pi), C2 = 1/16."""
        return cls(
            M=M,
            C1=np.exp(16.0 * M**2) / (4.0 * np.pi),
            C2=1.0 / 16.0,
            drift_integral=drift_integral,
        )

    @classmethod
    def for_solution(cls, sol: FundamentalSolution) -> "EnvelopeParams":
        """Heat-kernel constants shifted by the drift integral recorded in `sol`."""
        return cls.heat(sol.drift_integral)

    def scaled(self, c1: float = 1.0, c2: float = 1.0) -> "EnvelopeParams":
        return EnvelopeParams(self.M, self.C1 * c1, self.C2 * c2, self.drift_integral)


@dataclass(frozen=True)
class EnvelopeReport:
    """
    Attributes:
        max_ratio: max w / envelope over {w > support_floor}.
        violation_measure: Area of {w > envelope} inside the support set.
        drift_integral: Shift used by the envelope.
        drift_mismatch: |drift_integral - quadrature of the stored speed series|.
        mass_drift: max |mass(t) - mass(s)|.
        min_w: Smallest density value seen.
    """

    max_ratio: float
    violation_measure: float
    drift_integral: float
    drift_mismatch: float
    mass_drift: float
    min_w: float

    def to_dict(self) -> dict:
        return asdict(self)


def envelope_values(sol: FundamentalSolution, params: EnvelopeParams) -> np.ndarray:
    """The envelope on the grid of `sol` at its final time."""
    g = sol.grid
    tau = sol.t - sol.s + 0.5 * sol.initial_variance
    X1, X2 = g.mesh()
    h = g.h2
    lower, upper = g.x2[0] - 0.5 * h, g.x2[-1] + 0.5 * h
    y1, y2 = sol.y
    sources = (y2, 2.0 * upper - y2, 2.0 * lower - y2)
    env = np.zeros(g.shape)
    for n in (-2, -1, 0, 1, 2):
        d1 = X1 - y1 + n * g.L1
        for src in sources:
            r = np.hypot(d1, X2 - src)
            shifted = np.maximum(r - params.drift_integral, 0.0)
            env += np.exp(-params.C2 * shifted**2 / tau)
    return params.C1 / tau * env


def gaussian_envelope_check(
    sol: FundamentalSolution,
    params: EnvelopeParams,
    support_floor: float = SUPPORT_FLOOR,
) -> EnvelopeReport:
    """
    Pointwise comparison of w(t) with the Gaussian envelope.

    Raises:
        InvalidFieldError: If params were built from a drift integral other
            than the one recorded in `sol`.
    """
    recorded = float(np.sum(sol.drift_speeds * sol.drift_steps))
    mismatch = abs(params.drift_integral - recorded)
    if mismatch > DRIFT_AGREEMENT * max(1.0, params.drift_integral):
        raise InvalidFieldError(
            f"envelope drift integral differs from the record by {mismatch:.3e}"
        )
    env = envelope_values(sol, params)
    support = sol.w > support_floor
    ratio = np.where(support, sol.w / env, 0.0)
    cell = sol.grid.dx1 * sol.grid.h2
    report = EnvelopeReport(
        max_ratio=float(np.max(ratio)),
        violation_measure=float(np.count_nonzero(ratio > 1.0) * cell),
        drift_integral=params.drift_integral,
        drift_mismatch=mismatch,
        mass_drift=sol.mass_drift,
        min_w=float(np.min(sol.min_history)),
    )
    logger.info(
        f"Envelope check: max ratio {report.max_ratio:.4f}, "
        f"violation area {report.violation_measure:.2e}, D={params.drift_integral:.3e}"
    )
    return report


def l1_linf_smoothing(sol: FundamentalSolution, t_min: float) -> SlopeFit:
    """Fit sup w against t - s for t - s >= t_min; the heat rate is (t - s)^{-1}."""
    elapsed = sol.times - sol.s + 0.5 * sol.initial_variance
    keep = sol.times - sol.s >= t_min
    return slope_fit(elapsed[keep], sol.sup_history[keep])


__all__ = [
    "EnvelopeParams",
    "EnvelopeReport",
    "envelope_values",
    "gaussian_envelope_check",
    "l1_linf_smoothing",
]
