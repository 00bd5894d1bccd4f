import json
import logging

import numpy as np
import pytest

from core.errors import ConfigError
from logging_config import JsonFormatter
from utils import config_hash, provenance, read_series, write_series


class TestSeriesFiles:
    def test_header_row_without_comment_marker(self, tmp_path):
        columns = {"t": [0.0, 0.5], "v": [1, 2]}
        path = write_series(tmp_path / "nested" / "s.csv", columns)
        lines = path.read_text().splitlines()
        assert lines[0] == "t,v"
        assert lines[1] == "0,1"

    def test_read_back(self, tmp_path):
        t = np.linspace(0.0, 1.0, 5)
        path = write_series(tmp_path / "s.csv", {"t": t, "value": np.exp(-t)})
        columns = read_series(path)
        assert list(columns) == ["t", "value"]
        np.testing.assert_array_equal(columns["value"], np.exp(-t))

    def test_single_row(self, tmp_path):
        path = write_series(tmp_path / "s.csv", {"t": [0.0], "value": [2.0]})
        assert read_series(path)["value"].tolist() == [2.0]

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError):
            read_series(tmp_path / "absent.csv")


class TestProvenance:
    def test_hash_ignores_key_order(self):
        assert config_hash({"a": 1, "b": 2}) == config_hash({"b": 2, "a": 1})
        assert config_hash({"a": 1}) != config_hash({"a": 2})

    def test_block(self):
        block = provenance({"scenario": "bs-roundtrip"})
        assert set(block) == {"config_hash", "code_version", "python", "packages"}
        assert set(block["packages"]) == {"numpy", "scipy", "pydantic"}
        assert len(block["config_hash"]) == 64


class TestJsonFormatter:
    def make_record(self, **extra) -> logging.LogRecord:
        fields = {"msg": "step done", "levelname": "INFO", "name": "engine"}
        fields.update(extra)
        return logging.makeLogRecord(fields)

    def test_forwards_scenario_context(self):
        record = self.make_record(scenario="stokes-oracle", run_id="abc", step=3)
        payload = json.loads(JsonFormatter().format(record))
        assert payload["message"] == "step done"
        assert payload["scenario"] == "stokes-oracle"
        assert payload["run_id"] == "abc"
        assert payload["step"] == 3

    def test_omits_absent_context(self):
        payload = json.loads(JsonFormatter().format(self.make_record()))
        assert "scenario" not in payload
        assert payload["level"] == "INFO"
