from pathlib import Path

from orbitkem import bootstrap


def fake_runner(calls, failing=()):
    def run_command(cmd, quiet=False):
        calls.append(list(cmd))
        return 1 if any(marker in cmd for marker in failing) else 0

    return run_command


def test_preflight_with_ready_venv_runs_no_install(tmp_path, monkeypatch, capsys):
    (tmp_path / "venv").mkdir()
    calls = []
    monkeypatch.setattr(bootstrap, "run_command", fake_runner(calls))

    code = bootstrap.main(["--base-dir", str(tmp_path), "--preflight"])

    assert code == 0
    assert "Preflight checks passed" in capsys.readouterr().out
    assert not any("pip" in cmd for cmd in calls)
    probe = calls[-1]
    assert probe[1] == "-c"
    assert "portalocker" in probe[2] and "orbitkem.container" in probe[2]


def test_missing_imports_trigger_requirements_install(tmp_path, monkeypatch):
    (tmp_path / "venv").mkdir()
    (tmp_path / "requirements.txt").write_text("rich\n", encoding="utf-8")
    calls = []
    monkeypatch.setattr(bootstrap, "run_command", fake_runner(calls, failing=("-c",)))

    code = bootstrap.main(["--base-dir", str(tmp_path), "--preflight"])

    assert code == 0
    installs = [cmd for cmd in calls if "-r" in cmd]
    assert len(installs) == 1
    assert installs[0][-1] == str((tmp_path / "requirements.txt").resolve())


def test_missing_requirements_file_is_reported(tmp_path, monkeypatch, capsys):
    (tmp_path / "venv").mkdir()
    monkeypatch.setattr(bootstrap, "run_command", fake_runner([], failing=("-c",)))

    code = bootstrap.main(["--base-dir", str(tmp_path), "--preflight"])

    assert code == 1
    assert "not found" in capsys.readouterr().out


def test_verbs_are_forwarded_to_groundstation(tmp_path, monkeypatch):
    (tmp_path / "venv").mkdir()
    calls = []
    monkeypatch.setattr(bootstrap, "run_command", fake_runner(calls))

    assert bootstrap.main(["--base-dir", str(tmp_path), "keystore", "10"]) == 0
    entry = str((tmp_path / "groundstation.py").resolve())
    assert calls[-1][1:] == [entry, "keystore", "10"]


def test_no_verb_shows_help(tmp_path, monkeypatch):
    (tmp_path / "venv").mkdir()
    calls = []
    monkeypatch.setattr(bootstrap, "run_command", fake_runner(calls))

    bootstrap.main(["--base-dir", str(tmp_path)])
    assert calls[-1][-1] == "--help"


def test_venv_python_location(monkeypatch):
    monkeypatch.setattr(bootstrap.sys, "platform", "linux")
    assert bootstrap.get_venv_python(Path("v")) == Path("v") / "bin" / "python"
    monkeypatch.setattr(bootstrap.sys, "platform", "win32")
    assert bootstrap.get_venv_python(Path("v")) == Path("v") / "Scripts" / "python.exe"
