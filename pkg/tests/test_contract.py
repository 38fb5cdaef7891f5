import json
from dataclasses import fields
from pathlib import Path

import pytest

from orbitkem.models import ReportEnvelope, RunConfig
from orbitkem.repositories import ConfigRepository
from orbitkem.services.exchange_service import exchange_config
from orbitkem.sim import TraceRecord, run_exchange
from orbitkem.sim.trace import OUTCOMES

EXAMPLES = Path(__file__).resolve().parent.parent / "docs" / "report-examples"
TRACE_FIELDS = {f.name for f in fields(TraceRecord)}


def load_report_example():
    text = (EXAMPLES / "exchange_single_seed.json").read_text(encoding="utf-8")
    return json.loads(text)


@pytest.fixture(scope="module")
def lossless_result():
    return run_exchange(exchange_config(RunConfig(command="exchange"), seed=0))


def test_config_example_validates():
    text = (EXAMPLES / "lossy_sweep.conf").read_text(encoding="utf-8")
    values = ConfigRepository().parse(text, source="lossy_sweep.conf")
    config = RunConfig.model_validate({**values, "command": "exchange"})
    assert config.seeds == 100
    assert config.loss == 0.2
    assert config.pass_duration_s == 480
    assert config.report_format == "csv"


def test_report_example_validates_and_round_trips():
    doc = load_report_example()
    envelope = ReportEnvelope.model_validate(doc)
    assert envelope.command == "exchange"
    assert envelope.schema_version == 1
    assert envelope.model_dump(mode="json") == doc


def test_report_example_result_matches_real_summary_keys(lossless_result):
    doc = load_report_example()
    summary = lossless_result.summary()
    assert set(doc["result"]) == set(summary)
    assert set(doc["result"]["accounting"]) == set(summary["accounting"])
    assert doc["result"]["ground_state"] == summary["ground_state"]


def test_trace_example_rows_are_trace_records():
    lines = (EXAMPLES / "trace_excerpt.ndjson").read_text(encoding="utf-8").splitlines()
    header, *rows = [json.loads(line) for line in lines]
    assert header["kind"] == "header"
    assert header["schema_version"] == 1
    assert rows
    for row in rows:
        assert set(row) == TRACE_FIELDS
        assert row["outcome"] in OUTCOMES
        record = TraceRecord(**row)
        assert record.to_dict() == row


def test_real_trace_rows_match_documented_fields(lossless_result):
    rows = [json.loads(line) for line in lossless_result.trace.to_ndjson().splitlines()]
    assert rows
    kinds = {row["kind"] for row in rows}
    assert kinds <= {
        "PK_FRAGMENT",
        "CT_FRAGMENT",
        "FRAGMENT_NACK",
        "CONFIRM",
        "CONFIRM_ACK",
        "DATA",
    }
    for row in rows:
        assert set(row) == TRACE_FIELDS
        assert row["dir"] in ("up", "down")
        if row["outcome"] in ("lost", "out_of_window"):
            assert row["t_deliver_us"] is None
