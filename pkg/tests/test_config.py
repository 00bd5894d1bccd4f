from pathlib import Path

import pytest
from pydantic import ValidationError

from core.config import (
    AVAILABLE_SCENARIOS,
    ScenarioConfig,
    Settings,
    TimeConfig,
    load_scenario_config,
)
from core.errors import ConfigError, UnknownScenarioError

CONFIG_DIR = Path(__file__).resolve().parent.parent / "configs"

SAMPLE = """
[scenario]
name = conserved-trace
seed = 5

[grid]
N1 = 32
N2 = 65

[time]
dt = 1e-3
t_end = 0.01

[initial]
preset = blob
height = 1.5

[closure]
pressure = neumann

[extra]
record_interval = 2e-3
dts = 4e-3, 2e-3, 1e-3
mms_N2 = 17, 33
"""


def write_config(tmp_path: Path, text: str) -> Path:
    path = tmp_path / "scenario.cfg"
    path.write_text(text, encoding="utf-8")
    return path


class TestSettings:
    def test_defaults(self, monkeypatch):
        for name in ("VHP_THREADS", "VHP_EXECUTION_BACKEND", "VHP_CFL_SAFETY"):
            monkeypatch.delenv(name, raising=False)
        settings = Settings(_env_file=None)
        assert settings.THREADS == 1
        assert settings.EXECUTION_BACKEND == "serial"
        assert settings.CFL_SAFETY == 0.4

    def test_reads_prefixed_environment(self, monkeypatch):
        monkeypatch.setenv("VHP_THREADS", "4")
        monkeypatch.setenv("VHP_EXECUTION_BACKEND", "process")
        settings = Settings(_env_file=None)
        assert settings.THREADS == 4
        assert settings.EXECUTION_BACKEND == "process"

    @pytest.mark.parametrize(
        "name, value",
        [("VHP_THREADS", "0"), ("VHP_EXECUTION_BACKEND", "cluster")],
    )
    def test_rejects_invalid_values(self, monkeypatch, name, value):
        monkeypatch.setenv(name, value)
        with pytest.raises(ValidationError):
            Settings(_env_file=None)


class TestScenarioRegistry:
    def test_every_entry_is_described(self):
        assert len(AVAILABLE_SCENARIOS) == 8
        for entry in AVAILABLE_SCENARIOS.values():
            assert {"impl", "advances_flow", "description"} <= set(entry)

    @pytest.mark.parametrize("path", sorted(CONFIG_DIR.glob("*.cfg")), ids=str)
    def test_shipped_configs_load(self, path):
        config = load_scenario_config(path)
        assert config.scenario in AVAILABLE_SCENARIOS


class TestLoadScenarioConfig:
    def test_parses_every_section(self, tmp_path):
        config = load_scenario_config(write_config(tmp_path, SAMPLE))
        assert config.scenario == "conserved-trace"
        assert config.seed == 5
        assert config.grid.N1 == 32
        assert config.grid.H == 4.0
        assert config.time.t_end == 0.01
        assert config.initial.preset == "blob"
        assert config.closure.pressure == "neumann"
        assert config.advances_flow

    def test_extra_accessors(self, tmp_path):
        config = load_scenario_config(write_config(tmp_path, SAMPLE))
        assert config.get_float("record_interval", 1.0) == 2e-3
        assert config.get_float("missing", 1.5) == 1.5
        assert config.get_floats("dts", []) == [4e-3, 2e-3, 1e-3]
        assert config.get_ints("mms_N2", [9]) == [17, 33]
        assert config.get_ints("missing", [9]) == [9]

    def test_seed_override_reaches_the_initial_data(self, tmp_path):
        config = load_scenario_config(write_config(tmp_path, SAMPLE), seed=11)
        assert config.seed == 11
        assert config.initial.seed == 11

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError, match="not found"):
            load_scenario_config(tmp_path / "absent.cfg")

    def test_missing_scenario_name(self, tmp_path):
        with pytest.raises(ConfigError):
            load_scenario_config(write_config(tmp_path, "[grid]\nN1 = 32\n"))

    def test_unknown_scenario(self, tmp_path):
        path = write_config(tmp_path, "[scenario]\nname = vortex-street\n")
        with pytest.raises(UnknownScenarioError):
            load_scenario_config(path)

    @pytest.mark.parametrize(
        "section",
        [
            "[grid]\nN1 = 12\n",
            "[grid]\nN2 = 4\n",
            "[time]\ndt = 0.5\nt_end = 0.1\n",
            "[initial]\npreset = tornado\n",
            "[closure]\npressure = dirichlet\n",
        ],
    )
    def test_invalid_values(self, tmp_path, section):
        text = "[scenario]\nname = bs-roundtrip\n" + section
        with pytest.raises(ConfigError):
            load_scenario_config(write_config(tmp_path, text))

    def test_unparsable_file(self, tmp_path):
        with pytest.raises(ConfigError):
            load_scenario_config(write_config(tmp_path, "name = no section\n"))


class TestModels:
    def test_time_span_must_hold_a_step(self):
        with pytest.raises(ValidationError):
            TimeConfig(dt=1.0, t_end=0.5)

    def test_flow_advancing_scenarios(self):
        assert ScenarioConfig(scenario="smoothing-rates").advances_flow
        assert not ScenarioConfig(scenario="bs-roundtrip").advances_flow
