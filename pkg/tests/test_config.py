import threading
from pathlib import Path

import pytest
from pydantic import ValidationError

from workbench.core.concurrency import parallel_map
from workbench.core.config import Settings, settings
from workbench.geometry.cohomology import twist_diagram
from workbench.geometry.spaces import check_schematic


class TestSettings:
    """Environment-driven settings."""

    def test_defaults(self):
        s = Settings(_env_file=None)
        assert s.THREADS == 1
        assert s.VERIFY_CERTIFICATES is True
        assert s.CROSS_CHECK_CHAINS is False
        assert s.LOG_FORMAT == "console"

    @pytest.mark.parametrize("field", ["THREADS", "CENTRE_STEP_FACTOR"])
    def test_positive_fields(self, field):
        with pytest.raises(ValidationError):
            Settings(_env_file=None, **{field: 0})

    def test_log_format_is_normalized(self):
        assert Settings(_env_file=None, LOG_FORMAT="JSON").LOG_FORMAT == "json"
        with pytest.raises(ValidationError):
            Settings(_env_file=None, LOG_FORMAT="xml")

    def test_env_prefix(self, monkeypatch):
        monkeypatch.setenv("WORKBENCH_THREADS", "3")
        monkeypatch.setenv("WORKBENCH_CROSS_CHECK_CHAINS", "true")
        s = Settings(_env_file=None)
        assert s.THREADS == 3
        assert s.CROSS_CHECK_CHAINS is True

    def test_data_dir(self, tmp_path: Path):
        assert (Settings(_env_file=None).data_dir / "p1_model.yaml").is_file()
        assert Settings(_env_file=None, DATA_DIR=tmp_path).data_dir == tmp_path


class TestParallelMap:
    """Worker pool used for per-element checks."""

    def test_keeps_input_order(self):
        assert parallel_map(lambda n: n * n, range(20), threads=4) == [n * n for n in range(20)]

    def test_serial_when_one_thread(self):
        seen = []
        parallel_map(lambda n: seen.append(threading.get_ident()), range(5), threads=1)
        assert set(seen) == {threading.get_ident()}

    def test_schematic_is_independent_of_threads(self, p1, monkeypatch):
        serial = check_schematic(p1)
        monkeypatch.setattr(settings, "THREADS", 4)
        threaded = check_schematic(p1)
        assert threaded.verdict == serial.verdict
        assert threaded.rows == serial.rows

    def test_twist_window_is_independent_of_threads(self, monkeypatch):
        serial = twist_diagram(1, 0, degree_window=range(-3, 3))
        monkeypatch.setattr(settings, "THREADS", 3)
        threaded = twist_diagram(1, 0, degree_window=range(-3, 3))
        assert {d: t.dims for d, t in threaded.items()} == {d: t.dims for d, t in serial.items()}


class TestChainCrossCheck:
    """Optional comparison of witnesses along every covering chain."""

    def test_chart_model_passes(self, p1, monkeypatch):
        monkeypatch.setattr(settings, "CROSS_CHECK_CHAINS", True)
        report = check_schematic(p1)
        assert report.verdict is True
        assert report.notes == []

    def test_projective_plane_passes(self, p2, monkeypatch):
        monkeypatch.setattr(settings, "CROSS_CHECK_CHAINS", True)
        assert check_schematic(p2).verdict is True
