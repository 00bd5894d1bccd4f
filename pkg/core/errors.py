"""
Exception hierarchy for the laboratory.

Every error raised by the numerical packages derives from `VHPError`, and
each class carries the process exit code the CLI maps it to.
"""

from pathlib import Path
from typing import Optional


class VHPError(Exception):
    """Root of all laboratory errors."""

    exit_code: int = 1


class InvalidFieldError(VHPError, ValueError):
    """
    A field or operator argument violates a precondition.

    Raised for non-finite values, shape or grid mismatches, a nonzero
    wall-normal velocity trace, and invalid times or depths.
    """


class CFLViolationError(VHPError, ValueError):
    """An explicit step exceeds the advective stability bound."""

    def __init__(self, dt: float, bound: float):
        super().__init__(f"dt={dt:.3e} exceeds the CFL bound {bound:.3e}")
        self.dt = dt
        self.bound = bound


class QuadratureError(VHPError):
    """Kernel quadrature did not reach the requested tolerance."""

    def __init__(self, message: str, achieved_error: float):
        super().__init__(f"{message} (achieved error {achieved_error:.3e})")
        self.achieved_error = achieved_error


class SingularSystemError(VHPError):
    """A per-mode banded solve was singular."""


class UnknownScenarioError(VHPError):
    exit_code = 2


class ConfigError(VHPError):
    exit_code = 3


class SimulationDivergedError(VHPError):
    """
    A stepper produced NaN or Inf.

    Attributes:
        dump_path: Location of the `.npz` dump of the last finite state, if
            one could be written.
    """

    exit_code = 4

    def __init__(self, message: str, dump_path: Optional[Path] = None):
        if dump_path is not None:
            message = f"{message}; state dumped to {dump_path}"
        super().__init__(message)
        self.dump_path = dump_path


class DomainTruncationWarning(UserWarning):
    """Vorticity near the top of the truncated strip exceeds the leakage threshold."""
