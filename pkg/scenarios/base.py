"""
Shared plumbing of the scenario generators: gated criteria, results, and
the time-marching loop that feeds a RunHistory while reporting progress.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Generator, Literal, Optional

import numpy as np

from dynamics.state import RunHistory, SimState, Stepper, march
from services.kernel_cache import KernelCacheService

Comparison = Literal["<=", ">=", "in"]


@dataclass(frozen=True)
class Gate:
    """
    One acceptance criterion.

    Attributes:
        name: Criterion label as it appears in the report.
        value: Measured value.
        comparison: "<=" or ">=" against `threshold`, or "in" for the closed
            interval [threshold, upper].
        threshold: Bound (lower bound for "in").
        upper: Upper bound for "in".
    """

    name: str
    value: float
    comparison: Comparison
    threshold: float
    upper: Optional[float] = None

    @property
    def passed(self) -> bool:
        if not np.isfinite(self.value):
            return False
        if self.comparison == "<=":
            return self.value <= self.threshold
        if self.comparison == ">=":
            return self.value >= self.threshold
        return self.threshold <= self.value <= self.upper

    def to_dict(self) -> dict[str, Any]:
        return {
            "name": self.name,
            "value": float(self.value),
            "comparison": self.comparison,
            "threshold": self.threshold,
            "upper": self.upper,
            "status": "pass" if self.passed else "fail",
        }


@dataclass
class ScenarioResult:
    """
    Everything a scenario hands back to the worker.

    Attributes:
        gates: Gated criteria.
        metrics: Report-only values (slopes, drifts, margins).
        timeseries: Columns of `timeseries.csv`, keyed by column name.
        series: Extra two-column files, name -> (t, value).
    """

    gates: list[Gate] = field(default_factory=list)
    metrics: dict[str, Any] = field(default_factory=dict)
    timeseries: dict[str, np.ndarray] = field(default_factory=dict)
    series: dict[str, tuple[np.ndarray, np.ndarray]] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(g.passed for g in self.gates)

    def gate(self, *args, **kwargs) -> Gate:
        g = Gate(*args, **kwargs)
        self.gates.append(g)
        return g


@dataclass
class ScenarioContext:
    """Process resources a scenario may use."""

    kernel_cache: KernelCacheService
    cfl_safety: float = 0.4
    dump_dir: Optional[Path] = None


def evolve(
    stepper: Stepper,
    state: SimState,
    t_end: float,
    history: Optional[RunHistory] = None,
    record_every: int = 1,
    progress: Optional[Callable[[float], int]] = None,
) -> Generator[int, None, SimState]:
    """
    March `state` to t_end, recording every `record_every` steps.

    Yields progress integers when `progress` maps a completed fraction to
    one, and returns the last state, so callers use `yield from`.
    """
    if history is not None and len(history) == 0:
        history.record(state)
    n_total = max(1, int(round((t_end - state.t) / stepper.dt)))
    last_pct = -1
    for n, state in enumerate(march(stepper, state, t_end), start=1):
        if history is not None and (n % record_every == 0 or n == n_total):
            history.record(state)
        if progress is not None:
            pct = progress(n / n_total)
            if pct != last_pct:
                last_pct = pct
                yield pct
    return state


def history_columns(history: RunHistory) -> dict[str, np.ndarray]:
    """The fixed `timeseries.csv` columns of a vorticity run."""
    return {
        "t": np.asarray(history.times),
        "sup_omega": np.asarray(history.sup_omega),
        "sup_u": np.asarray(history.sup_u),
        "sup_grad_u": np.asarray(history.sup_grad_u),
        "trace_drift": history.trace_drift(),
        "leakage": np.asarray(history.leakage),
    }


def stage(start: int, end: int) -> Callable[[float], int]:
    """Map the completed fraction of one stage onto [start, end] percent."""
    return lambda fraction: int(start + (end - start) * fraction)


__all__ = [
    "Gate",
    "ScenarioResult",
    "ScenarioContext",
    "evolve",
    "history_columns",
    "stage",
]
