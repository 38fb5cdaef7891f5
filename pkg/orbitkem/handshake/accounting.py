"""Link-budget accounting over a transmission trace."""

from __future__ import annotations

from collections.abc import Iterable
from typing import Protocol

from pydantic import BaseModel

FRAGMENT_KINDS = frozenset({"PK_FRAGMENT", "CT_FRAGMENT"})


class AirRecord(Protocol):
    dir: str
    size: int
    outcome: str
    kind: str
    retransmit: bool
    pass_index: int
    payload_size: int


class AccountingReport(BaseModel):
    uplink_bytes: int = 0
    downlink_bytes: int = 0
    uplink_payload_bytes: int = 0
    downlink_payload_bytes: int = 0
    packets: int = 0
    retransmissions: int = 0
    passes_used: int = 0
    uplink_fragments: int = 0
    downlink_fragments: int = 0
    lost: int = 0
    corrupted: int = 0


def bytes_over_air(trace: Iterable[AirRecord]) -> AccountingReport:
    """Totals for every packet actually radiated (out-of-window sends are skipped)."""
    report = AccountingReport()
    last_pass = -1
    for record in trace:
        if record.outcome == "out_of_window":
            continue
        up = record.dir == "up"
        report.packets += 1
        if up:
            report.uplink_bytes += record.size
            report.uplink_payload_bytes += record.payload_size
        else:
            report.downlink_bytes += record.size
            report.downlink_payload_bytes += record.payload_size
        if record.kind in FRAGMENT_KINDS:
            if up:
                report.uplink_fragments += 1
            else:
                report.downlink_fragments += 1
        if record.retransmit:
            report.retransmissions += 1
        if record.outcome == "lost":
            report.lost += 1
        elif record.outcome == "corrupted":
            report.corrupted += 1
        last_pass = max(last_pass, record.pass_index)
    report.passes_used = last_pass + 1
    return report
