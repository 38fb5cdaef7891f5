import json
from pathlib import Path
from unittest.mock import patch

import pytest

import groundstation
from orbitkem.models import ConfigError
from orbitkem.repositories import ConfigRepository, ReportRepository, SessionRepository
from orbitkem.repositories import report_repository


class FakeLockException(Exception):
    pass


class FakeFileLock:
    def __init__(self, filename, mode="a", encoding="utf-8", **kwargs):
        self.filename = filename
        self.mode = mode
        self.encoding = encoding
        self._file = None

    def __enter__(self):
        self._file = open(self.filename, self.mode, encoding=self.encoding)
        return self._file

    def __exit__(self, exc_type, exc, tb):
        if self._file is not None:
            self._file.close()


class FakePortalocker:
    class exceptions:
        LockException = FakeLockException

    def Lock(self, filename, mode="a", timeout=None, fail_when_locked=False, **kwargs):
        return FakeFileLock(filename, mode=mode, **kwargs)


def test_append_ndjson_writes_rows(tmp_path, monkeypatch):
    monkeypatch.setattr(report_repository, "portalocker", FakePortalocker())
    path = tmp_path / "traces" / "run.ndjson"

    assert ReportRepository().append_ndjson(path, [{"a": 1}, {"b": 2}]) is True
    assert ReportRepository().append_ndjson(path, [{"c": 3}]) is True

    rows = [json.loads(line) for line in path.read_text(encoding="utf-8").splitlines()]
    assert rows == [{"a": 1}, {"b": 2}, {"c": 3}]


def test_append_ndjson_retries_then_succeeds(tmp_path, monkeypatch):
    fake_portalocker = FakePortalocker()
    lock_error = FakeLockException("busy")
    monkeypatch.setattr(report_repository, "portalocker", fake_portalocker)
    path = tmp_path / "run.ndjson"

    with (
        patch.object(
            fake_portalocker,
            "Lock",
            side_effect=[lock_error, lock_error, FakeFileLock(path)],
        ) as mock_lock,
        patch("orbitkem.repositories.report_repository.time.sleep"),
    ):
        assert ReportRepository().append_ndjson(path, [{"seed": 1}])

    assert mock_lock.call_count == 3


def test_append_ndjson_fails_after_retry_exhaustion(tmp_path, monkeypatch):
    fake_portalocker = FakePortalocker()
    monkeypatch.setattr(report_repository, "portalocker", fake_portalocker)
    monkeypatch.setattr(report_repository, "LOCK_MAX_ATTEMPTS", 3)

    with (
        patch.object(
            fake_portalocker, "Lock", side_effect=FakeLockException("busy")
        ) as mock_lock,
        patch("orbitkem.repositories.report_repository.time.sleep"),
    ):
        assert ReportRepository().append_ndjson(tmp_path / "run.ndjson", [{}]) is False

    assert mock_lock.call_count == 3


def test_missing_portalocker_fails_fast(monkeypatch):
    app = groundstation.GroundStationApp.__new__(groundstation.GroundStationApp)
    monkeypatch.setattr(groundstation, "portalocker", None)
    monkeypatch.setattr(
        groundstation, "_PORTALOCKER_IMPORT_ERROR", ImportError("not installed")
    )

    with pytest.raises(SystemExit, match="Missing dependency 'portalocker'"):
        app.ensure_locking_dependency()


def test_write_text_atomic_leaves_no_temp_files(tmp_path):
    path = tmp_path / "out" / "report.json"
    ReportRepository().write_text_atomic(path, "first")
    ReportRepository().write_text_atomic(path, "second")
    assert path.read_text(encoding="utf-8") == "second"
    assert [p.name for p in path.parent.iterdir()] == ["report.json"]


def test_csv_report_carries_version_and_config():
    envelope = {
        "version": "1.2.3",
        "config": {"seed": 4},
        "rows": [{"n": 2, "mismatches": ["ss"]}],
    }
    lines = ReportRepository().render_csv(envelope).splitlines()
    assert lines[0] == "# version=1.2.3"
    assert lines[1] == '# config={"seed": 4}'
    assert lines[2] == "n,mismatches"
    assert lines[3] == '2,"[""ss""]"'


def test_csv_report_falls_back_to_result():
    text = ReportRepository().render_csv({"version": "x", "result": {"passed": 3}})
    assert text.splitlines()[-2:] == ["passed", "3"]


def test_snapshot_roundtrip_on_disk(tmp_path):
    repository = SessionRepository()
    path = tmp_path / "snapshots" / "seed0-ground.okhs"
    repository.save_snapshot(path, b"OKHS\x01")
    assert repository.load_snapshot(path) == b"OKHS\x01"


def test_load_config_defaults_when_missing(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    assert ConfigRepository().load_config() == {}


def test_load_config_explicit_missing_file(tmp_path):
    with pytest.raises(ConfigError, match="does not exist"):
        ConfigRepository().load_config(tmp_path / "nope.conf")


def test_parse_config_skips_comments_and_normalizes_keys(tmp_path):
    path = tmp_path / "run.conf"
    path.write_text(
        "# sweep settings\n\nloss = 0.2\nturnaround-ms = 15\nhmac_alg = sha256\n",
        encoding="utf-8",
    )
    values = ConfigRepository().load_config(path)
    assert values == {"loss": "0.2", "turnaround_ms": "15", "hmac_alg": "sha256"}


@pytest.mark.parametrize(
    ("text", "message"),
    [
        ("loss 0.2\n", "expected 'key = value'"),
        ("bogus = 1\n", "unknown key 'bogus'"),
        ("command = bench\n", "unknown key 'command'"),
    ],
)
def test_parse_config_errors(text, message):
    with pytest.raises(ConfigError, match=message):
        ConfigRepository().parse(text, source="run.conf")


def test_unreadable_default_config_logs_warning(tmp_path, monkeypatch, caplog):
    monkeypatch.chdir(tmp_path)
    Path("orbitkem.conf").write_bytes(b"\xff\xfe\x00")
    with caplog.at_level("WARNING"):
        assert ConfigRepository().load_config() == {}
    assert "Failed to load config" in caplog.text
