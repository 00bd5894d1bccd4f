import json

import pytest

from fields.grid import Grid
from services.kernel_cache import KernelCacheService
from services.run_service import RunService


@pytest.fixture
def service(tmp_path) -> RunService:
    return RunService(tmp_path)


def read_record(service: RunService, run_id: str) -> dict:
    return json.loads((service.run_dir(run_id) / "run.json").read_text())


class TestRunService:
    def test_create_run_persists_a_queued_record(self, service, tmp_path):
        record = service.create_run("bs-roundtrip")
        run_dir = service.run_dir(record.id)
        assert run_dir == tmp_path / f"bs-roundtrip-{record.id}"
        assert read_record(service, record.id)["status"] == "queued"
        assert service.get_run(record.id) is record

    def test_explicit_directory_and_id(self, service, tmp_path):
        record = service.create_run(
            "bs-roundtrip", out_dir=tmp_path / "out", run_id="r1"
        )
        assert record.id == "r1"
        assert service.run_dir("r1") == tmp_path / "out"
        assert (tmp_path / "out" / "run.json").is_file()

    def test_completed_runs_exit_cleanly(self, service):
        record = service.create_run("stokes-oracle")
        service.set_run_status(record.id, "running")
        assert record.started_at > 0.0
        service.set_run_status(record.id, "completed")
        saved = read_record(service, record.id)
        assert saved["status"] == "completed"
        assert saved["progress"] == 100
        assert saved["exit_code"] == 0
        assert saved["finished_at"] >= saved["started_at"]

    def test_failed_runs_keep_their_reason(self, service):
        record = service.create_run("stokes-oracle")
        service.set_run_as_failed(record.id, "diverged", 4)
        saved = service.as_dict(record.id)
        assert saved["status"] == "failed"
        assert saved["exit_code"] == 4
        assert saved["error_detail"] == "diverged"

    def test_progress_is_monotone_and_clamped(self, service):
        record = service.create_run("stokes-oracle")
        service.update_progress(record.id, 40)
        service.update_progress(record.id, 20)
        assert record.progress == 40
        service.update_progress(record.id, 250)
        assert record.progress == 100

    def test_unknown_run(self, service):
        assert service.get_run("missing") is None


class TestKernelCacheService:
    @pytest.fixture
    def tiny_grid(self) -> Grid:
        return Grid(1.0, 8, 1.0, 9)

    def test_rejects_empty_cache(self):
        with pytest.raises(ValueError):
            KernelCacheService(max_size=0)

    def test_hits_and_misses(self, tiny_grid):
        cache = KernelCacheService(max_size=4)
        first = cache.get(tiny_grid, 0.1)
        second = cache(tiny_grid, 0.1)
        assert first is second
        assert (cache.hits, cache.misses) == (1, 1)

    def test_least_recently_used_table_is_evicted(self, tiny_grid):
        cache = KernelCacheService(max_size=2)
        cache.get(tiny_grid, 0.1)
        cache.get(tiny_grid, 0.2)
        cache.get(tiny_grid, 0.1)
        cache.get(tiny_grid, 0.3)
        assert len(cache) == 2
        cache.get(tiny_grid, 0.1)
        assert cache.misses == 3
        cache.get(tiny_grid, 0.2)
        assert cache.misses == 4

    def test_keys_distinguish_grids(self, tiny_grid):
        cache = KernelCacheService()
        a = cache.get(tiny_grid, 0.1)
        b = cache.get(tiny_grid.refined(), 0.1)
        assert a is not b
        assert a.grid == tiny_grid
