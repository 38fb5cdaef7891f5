import json
import logging

import pytest

import groundstation
from orbitkem.constants import EXIT_FAILURE, EXIT_OK, EXIT_USAGE
from orbitkem.handshake import HandshakeState
from orbitkem.link import CspHeader, seal
from orbitkem.services.keystore_service import keystore_row, pairwise_keys

LINK_KEY = bytes(range(16))


@pytest.fixture(autouse=True)
def isolated_cwd(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)


@pytest.fixture
def app():
    return groundstation.GroundStationApp()


def test_keystore_scaling_for_a_hundred_satellites(app):
    assert app.run(["keystore", "100"]) == EXIT_OK
    row = app.last_envelope["rows"][0]
    assert row["pairwise_keys"] == 4950
    assert row["pk_keys"] == 200
    assert row["pairwise_storage_bytes"] == 4950 * 32
    assert row["pk_storage_bytes"] == 100 * 2432


def test_keystore_counts_follow_recurrence():
    assert pairwise_keys(1) == 0
    assert pairwise_keys(2) == 1
    for n in range(1, 10_001):
        assert pairwise_keys(n + 1) == pairwise_keys(n) + n
    assert keystore_row(1).pairwise_per_node_bytes == 0
    assert keystore_row(7).pk_keys == 14


def test_keystore_rejects_zero(app, capsys):
    assert app.run(["keystore", "0"]) == EXIT_USAGE
    assert "at least 1" in capsys.readouterr().err


def test_keystore_csv_report(app, tmp_path):
    out = tmp_path / "keystore.csv"
    assert app.run(["keystore", "3", "4", "--output", str(out), "--format", "csv"]) == 0
    lines = out.read_text(encoding="utf-8").splitlines()
    assert lines[0].startswith("# version=")
    assert lines[1].startswith("# config=")
    assert lines[2].startswith("n,pairwise_keys,")
    assert lines[3].startswith("3,3,6,")
    assert app.reports_written == [str(out)]


def test_bench_with_few_iterations_is_informational(app, capsys):
    argv = ["bench", "--ops", "seal,verify,xtea_block,tamper", "--iterations", "3"]
    assert app.run(argv) == EXIT_OK
    envelope = app.last_envelope
    assert [row["name"] for row in envelope["rows"]] == ["seal", "verify", "xtea_block"]
    assert all(row["informational"] for row in envelope["rows"])
    assert envelope["result"]["tamper"]["gcm_detection_rate"] == 1.0
    assert envelope["result"]["tamper"]["xtea_ctr_detection_rate"] == 0.0
    assert envelope["environment"]["cryptography"]
    assert "informational only" in capsys.readouterr().out


def test_bench_rejects_unknown_operation(app):
    assert app.run(["bench", "--ops", "keygen,warp"]) == EXIT_USAGE


def test_kat_missing_file_is_a_usage_error(app, tmp_path):
    assert app.run(["kat", str(tmp_path / "missing.rsp")]) == EXIT_USAGE


def test_kat_generate_needs_output(app):
    assert app.run(["kat", "--generate", "1"]) == EXIT_USAGE


def test_kat_generate_then_check(tmp_path):
    path = tmp_path / "vectors.rsp"
    app = groundstation.GroundStationApp()
    assert app.run(["kat", "--generate", "2", "--output", str(path)]) == EXIT_OK

    app = groundstation.GroundStationApp()
    assert app.run(["kat", str(path)]) == EXIT_OK
    assert app.last_envelope["result"]["passed"] == 2

    lines = path.read_text(encoding="ascii").splitlines()
    index = next(i for i, line in enumerate(lines) if line.startswith("ss = "))
    digit = lines[index][5]
    lines[index] = "ss = " + ("0" if digit != "0" else "1") + lines[index][6:]
    path.write_text("\n".join(lines) + "\n", encoding="ascii")

    app = groundstation.GroundStationApp()
    assert app.run(["kat", str(path)]) == EXIT_FAILURE
    assert app.last_envelope["result"]["failed_counts"] == [0]


@pytest.mark.parametrize(
    "argv",
    [
        ["exchange", "--loss", "abc"],
        ["exchange", "--loss", "1.5"],
        ["exchange", "--mtu", "8"],
        ["teleport"],
        [],
    ],
)
def test_bad_arguments_exit_with_usage(app, argv):
    assert app.run(argv) == EXIT_USAGE


def test_exchange_reads_config_file_and_writes_json(app, tmp_path):
    conf = tmp_path / "run.conf"
    conf.write_text("# quick run\ndata-frames = 1\nseed = 7\n", encoding="utf-8")
    out = tmp_path / "exchange.json"
    assert app.run(["exchange", "--config", str(conf), "--output", str(out)]) == EXIT_OK

    report = json.loads(out.read_text(encoding="utf-8"))
    assert report["command"] == "exchange"
    assert report["config"]["data_frames"] == 1
    assert report["config"]["seed"] == 7
    assert report["result"]["established"] is True
    assert report["rows"][0]["seed"] == 7


def test_command_line_overrides_config_file(app, tmp_path):
    conf = tmp_path / "run.conf"
    conf.write_text("keystore-ignored = 1\n", encoding="utf-8")
    assert app.run(["keystore", "2", "--config", str(conf)]) == EXIT_USAGE

    conf.write_text("iterations = 50\n", encoding="utf-8")
    argv = ["bench", "--config", str(conf), "--iterations", "2", "--ops", "xtea_block"]
    assert app.run(argv) == EXIT_OK
    assert app.config.iterations == 2


def test_exchange_trace_and_snapshots(app, tmp_path):
    trace = tmp_path / "trace.ndjson"
    snapshots = tmp_path / "snapshots"
    argv = [
        "exchange",
        "--seed",
        "3",
        "--trace",
        str(trace),
        "--snapshot-dir",
        str(snapshots),
    ]
    assert app.run(argv) == EXIT_OK

    rows = [json.loads(line) for line in trace.read_text(encoding="utf-8").splitlines()]
    assert rows[0] == {"kind": "header", "schema_version": 1, "seed": 3}
    assert len(rows) > 10
    assert {"t_us", "dir", "size", "outcome", "port"} <= set(rows[1])

    ground = app.exchange_service.load_snapshot(snapshots / "seed3-ground.okhs")
    satellite = app.exchange_service.load_snapshot(snapshots / "seed3-satellite.okhs")
    assert ground.state is satellite.state is HandshakeState.ESTABLISHED
    assert ground.config.party == "ground"
    assert ground.shared_secret == satellite.shared_secret


def test_exchange_sweep_summary(app):
    argv = ["exchange", "--seeds", "2", "--workers", "2", "--loss", "0.1"]
    assert app.run(argv) == EXIT_OK
    result = app.last_envelope["result"]
    assert result["runs"] == 2
    assert result["established"] == 2
    assert result["success_rate"] == 1.0
    assert sum(result["pass_histogram"].values()) == 2
    assert [row["seed"] for row in app.last_envelope["rows"]] == [0, 1]


def test_exchange_that_cannot_finish_exits_with_failure(app):
    argv = ["exchange", "--pass-duration", "1", "--rate", "3600", "--horizon", "6000"]
    assert app.run(argv) == EXIT_FAILURE
    assert app.last_envelope["result"]["established"] is False


def test_dump_packet(app, capsys):
    header = CspHeader(
        priority=2, source=1, destination=10, destination_port=22, source_port=32
    )
    wire = seal(header, b"\x03\x00\x01", crc_on=True, hmac_key=LINK_KEY).to_bytes()
    assert app.run(["dump-packet", wire.hex(), "--key", LINK_KEY.hex()]) == EXIT_OK
    rows = {row["field"]: row["value"] for row in app.last_envelope["rows"]}
    assert rows["destination_port"] == "22 (control)"
    assert "CSP packet" in capsys.readouterr().out

    wrong_key = bytes(16).hex()
    assert app.run(["dump-packet", wire.hex(), "--key", wrong_key]) == EXIT_FAILURE
    assert app.run(["dump-packet", "zz"]) == EXIT_USAGE


def test_verbose_flag_raises_log_level(app):
    assert app.run(["keystore", "5", "-vv"]) == EXIT_OK
    assert logging.getLogger("orbitkem").level == logging.DEBUG
    logging.getLogger("orbitkem").setLevel(logging.NOTSET)
    logging.getLogger("groundstation").setLevel(logging.NOTSET)


def test_unexpected_errors_are_logged(app, monkeypatch, caplog):
    def explode(_args):
        raise RuntimeError("boom")

    monkeypatch.setitem(app.command_handlers, "keystore", explode)
    with caplog.at_level(logging.ERROR):
        assert app.run(["keystore", "1"]) == EXIT_FAILURE
    assert "Command keystore crashed" in caplog.text
