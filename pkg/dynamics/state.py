"""
Stepper state, forcing inputs and the run history the diagnostics consume.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterator, Optional, Protocol

import numpy as np

from core.errors import InvalidFieldError
from fields.grid import BoundaryTrace, ScalarField, VectorField
from fields.spectral import d_tangential, d_vertical
from operators.biot_savart import biot_savart, top_leakage, trace_functional
from utils import read_series


@dataclass(frozen=True, eq=False)
class SimState:
    """
    One instant of a vorticity run.

    Attributes:
        t: Time.
        omega: Vorticity.
        u_cache: biot_savart(omega).
        prev_advection: Spectral advection term of the previous step, used by
            the Adams-Bashforth extrapolation. None before the first step.
        prev_wall_d1pF: Spectral d1 p_F on the wall from the previous step.
        step: Number of steps taken.
    """

    t: float
    omega: ScalarField
    u_cache: VectorField
    prev_advection: Optional[np.ndarray] = None
    prev_wall_d1pF: Optional[np.ndarray] = None
    step: int = 0

    @classmethod
    def initial(cls, omega: ScalarField, t: float = 0.0) -> "SimState":
        return cls(t=t, omega=omega, u_cache=biot_savart(omega))

    @property
    def grid(self):
        return self.omega.grid


class Stepper(Protocol):
    dt: float

    def step(self, state: SimState) -> SimState: ...


def march(
    stepper: Stepper, state: SimState, t_end: float, tol: float = 1e-12
) -> Iterator[SimState]:
    """Yield successive states until t_end is reached (t monotone)."""
    n_steps = int(round((t_end - state.t) / stepper.dt))
    mismatch = abs(state.t + n_steps * stepper.dt - t_end)
    if n_steps < 0 or mismatch > tol * max(1.0, t_end):
        raise InvalidFieldError(
            f"t_end={t_end} is not a whole number of steps dt={stepper.dt} "
            f"from t={state.t}"
        )
    for _ in range(n_steps):
        state = stepper.step(state)
        yield state


@dataclass(frozen=True)
class Forcing:
    """
    Optional inhomogeneous data of the vorticity problem.

    body(t) is added to the vorticity equation, wall(t) to the right-hand side
    of the wall condition and top(t) prescribes omega at x2 = H.
    """

    body: Optional[Callable[[float], ScalarField]] = None
    wall: Optional[Callable[[float], BoundaryTrace]] = None
    top: Optional[Callable[[float], BoundaryTrace]] = None


@dataclass(frozen=True, eq=False)
class ForcingSeries:
    """A scalar time series (t, value), linearly interpolated."""

    t: np.ndarray
    values: np.ndarray

    def __post_init__(self) -> None:
        t = np.asarray(self.t, dtype=float)
        v = np.asarray(self.values, dtype=float)
        if t.shape != v.shape or t.ndim != 1 or t.size == 0:
            raise InvalidFieldError("series needs matching 1D t and value columns")
        if not (np.all(np.isfinite(t)) and np.all(np.isfinite(v))):
            raise InvalidFieldError("series contains non-finite values")
        if np.any(np.diff(t) <= 0):
            raise InvalidFieldError("series times must be strictly increasing")
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "values", v)

    @classmethod
    def constant(cls, value: float, t_end: float = 1.0) -> "ForcingSeries":
        return cls(np.array([0.0, t_end]), np.array([value, value]))

    @classmethod
    def from_csv(cls, path: str | Path) -> "ForcingSeries":
        """Read a CSV with header columns `t,value`."""
        columns = read_series(path)
        try:
            return cls(columns["t"], columns["value"])
        except KeyError as e:
            raise InvalidFieldError(f"{path} lacks column {e}") from e

    def __call__(self, t):
        return np.interp(t, self.t, self.values)


@dataclass
class RunHistory:
    """
    Per-record diagnostics of a vorticity run.

    Traces are stored instead of full snapshots; snapshots are kept only when
    `keep_snapshots` is set (needed by c2_residual).
    """

    keep_snapshots: bool = False
    times: list[float] = field(default_factory=list)
    sup_omega: list[float] = field(default_factory=list)
    sup_d1_omega: list[float] = field(default_factory=list)
    sup_u: list[float] = field(default_factory=list)
    sup_grad_u: list[float] = field(default_factory=list)
    sup_grad2_u: list[float] = field(default_factory=list)
    sup_dt_u: list[float] = field(default_factory=list)
    leakage: list[float] = field(default_factory=list)
    traces: list[np.ndarray] = field(default_factory=list)
    snapshots: list[SimState] = field(default_factory=list)
    _last: Optional[SimState] = field(default=None, repr=False)

    def record(self, state: SimState) -> None:
        u = state.u_cache
        first = [op(c) for c in (u.u1, u.u2) for op in (d_tangential, d_vertical)]
        second = [op(c) for c in first for op in (d_tangential, d_vertical)]
        self.times.append(state.t)
        self.sup_omega.append(state.omega.sup())
        self.sup_d1_omega.append(d_tangential(state.omega).sup())
        self.sup_u.append(u.sup())
        self.sup_grad_u.append(max(c.sup() for c in first))
        self.sup_grad2_u.append(max(c.sup() for c in second))
        if self._last is not None and state.t > self._last.t:
            du = (u - self._last.u_cache) * (1.0 / (state.t - self._last.t))
            self.sup_dt_u.append(du.sup())
        else:
            self.sup_dt_u.append(float("nan"))
        self.leakage.append(top_leakage(state.omega))
        self.traces.append(trace_functional(state.omega).values)
        if self.keep_snapshots:
            self.snapshots.append(state)
        self._last = state

    def trace_drift(self) -> np.ndarray:
        """sup_x1 |b(t) - b(t0)| per record."""
        if not self.traces:
            return np.zeros(0)
        b0 = self.traces[0]
        return np.array([float(np.max(np.abs(b - b0))) for b in self.traces])

    def __len__(self) -> int:
        return len(self.times)
