import configparser
import math
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional

from pydantic import BaseModel, Field, ValidationError, model_validator
from pydantic_settings import BaseSettings, SettingsConfigDict

from core.errors import ConfigError, InvalidFieldError, UnknownScenarioError
from fields.grid import Grid


class Settings(BaseSettings):
    """
    Process-wide settings, loaded from `VHP_*` environment variables.
    Utilizes pydantic-settings for type validation and loading from .env files.
    """

    model_config = SettingsConfigDict(
        env_prefix="VHP_", env_file=".env", env_file_encoding="utf-8", extra="ignore"
    )

    LOG_LEVEL: str = "INFO"
    THREADS: int = Field(1, ge=1)
    EXECUTION_BACKEND: Literal["serial", "process"] = "serial"
    OUTPUT_DIR: Path = Path("runs")
    KERNEL_CACHE_SIZE: int = Field(16, ge=1)
    CFL_SAFETY: float = Field(0.4, gt=0.0, le=1.0)


# --- Scenario Registry ---
# Every acceptance scenario, keyed by the id used in config files.
AVAILABLE_SCENARIOS: Dict[str, Dict[str, Any]] = {
    "bs-roundtrip": {
        "impl": "bs_roundtrip",
        "advances_flow": False,
        "description": "Biot-Savart round trip and the no-slip trace identity.",
    },
    "semigroup-bench": {
        "impl": "semigroup_bench",
        "advances_flow": False,
        "description": "Boundary kernel, duality, semigroup law and scaling slopes.",
    },
    "stokes-oracle": {
        "impl": "stokes_oracle",
        "advances_flow": False,
        "description": "n-step linear Duhamel evolution vs the single-shot T(t)u0.",
    },
    "nonlinear-cross-check": {
        "impl": "nonlinear_cross_check",
        "advances_flow": True,
        "description": "IMEX vs Duhamel nonlinear runs and manufactured orders.",
    },
    "conserved-trace": {
        "impl": "conserved_trace",
        "advances_flow": True,
        "description": "Wall trace drift under the C2 closure vs Neumann ablation.",
    },
    "shear-counterexample": {
        "impl": "shear_counterexample",
        "advances_flow": False,
        "description": "Forced shear flows violate the C2 closure: r1 = f, r2 = 0.",
    },
    "green-envelope": {
        "impl": "green_envelope",
        "advances_flow": False,
        "description": "Drift-diffusion fundamental solution vs its Gaussian envelope.",
    },
    "smoothing-rates": {
        "impl": "smoothing_rates",
        "advances_flow": True,
        "description": "Short-time smoothing of rough band-limited data.",
    },
}

InitialPreset = Literal["zero", "vortex_pair", "blob", "band_limited", "shear"]


class GridConfig(BaseModel):
    L1: float = 2.0 * math.pi
    N1: int = 64
    H: float = 4.0
    N2: int = 129

    @model_validator(mode="after")
    def _check_grid(self) -> "GridConfig":
        try:
            self.build()
        except InvalidFieldError as e:
            raise ValueError(str(e)) from e
        return self

    def build(self) -> Grid:
        return Grid(self.L1, self.N1, self.H, self.N2)


class TimeConfig(BaseModel):
    dt: float = Field(1e-3, gt=0.0)
    t_end: float = Field(0.1, gt=0.0)

    @model_validator(mode="after")
    def _check_span(self) -> "TimeConfig":
        if self.dt > self.t_end:
            raise ValueError(f"dt={self.dt} exceeds t_end={self.t_end}")
        return self


class InitialConfig(BaseModel):
    preset: InitialPreset = "vortex_pair"
    amplitude: float = 1.0
    width: float = Field(0.75, gt=0.0)
    height: float = Field(1.0, gt=0.0)
    modes: int = Field(8, ge=1)
    seed: int = Field(0, ge=0)


class ClosureConfig(BaseModel):
    pressure: Literal["c2", "neumann"] = "c2"


class OutputConfig(BaseModel):
    dir: Optional[Path] = None
    snapshots: bool = False


class ScenarioConfig(BaseModel):
    """A validated scenario configuration file."""

    scenario: str
    seed: int = Field(0, ge=0)
    grid: GridConfig = GridConfig()
    time: TimeConfig = TimeConfig()
    initial: InitialConfig = InitialConfig()
    closure: ClosureConfig = ClosureConfig()
    output: OutputConfig = OutputConfig()
    extra: Dict[str, str] = Field(default_factory=dict)

    def get_float(self, key: str, default: float) -> float:
        return float(self.extra.get(key, default))

    def get_int(self, key: str, default: int) -> int:
        return int(self.extra.get(key, default))

    def get_floats(self, key: str, default: List[float]) -> List[float]:
        """Comma-separated list from the [extra] section."""
        if key not in self.extra:
            return list(default)
        return [float(v) for v in self.extra[key].split(",") if v.strip()]

    def get_ints(self, key: str, default: List[int]) -> List[int]:
        return [int(v) for v in self.get_floats(key, default)]

    @property
    def advances_flow(self) -> bool:
        return bool(AVAILABLE_SCENARIOS[self.scenario]["advances_flow"])


_SECTIONS = ("grid", "time", "initial", "closure", "output")


def load_scenario_config(path: Path, seed: Optional[int] = None) -> ScenarioConfig:
    """
    Parses and validates a scenario config file.

    Args:
        path: Config file with [scenario], [grid], [time], [initial],
            [closure], [output] and [extra] sections.
        seed: Overrides the [scenario] seed (and the initial-data seed).

    Raises:
        ConfigError: If the file is missing, unparsable or invalid.
        UnknownScenarioError: If the scenario id is not registered.
    """
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"Config file not found: {path}")

    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    parser.optionxform = str  # keep key case (L1, N2)
    try:
        parser.read(path, encoding="utf-8")
    except configparser.Error as e:
        raise ConfigError(f"Could not parse config file {path}: {e}") from e

    if not parser.has_option("scenario", "name"):
        raise ConfigError(f"Config file {path} has no [scenario] name")
    name = parser.get("scenario", "name").strip()
    if name not in AVAILABLE_SCENARIOS:
        raise UnknownScenarioError(
            f"Unknown scenario '{name}' in {path}. "
            f"Available: {', '.join(AVAILABLE_SCENARIOS)}"
        )

    raw: Dict[str, Any] = {"scenario": name}
    if parser.has_option("scenario", "seed"):
        raw["seed"] = parser.get("scenario", "seed")
    for section in _SECTIONS:
        if parser.has_section(section):
            raw[section] = dict(parser.items(section))
    if parser.has_section("extra"):
        raw["extra"] = dict(parser.items("extra"))
    if seed is not None:
        raw["seed"] = seed
        raw.setdefault("initial", {})["seed"] = seed

    try:
        return ScenarioConfig.model_validate(raw)
    except ValidationError as e:
        raise ConfigError(f"Invalid config file {path}: {e}") from e
