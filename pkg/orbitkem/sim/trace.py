"""Ordered record of every simulated transmission, exportable as NDJSON."""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import asdict, dataclass, field

OUTCOMES = ("delivered", "lost", "corrupted", "out_of_window")


@dataclass(frozen=True)
class TraceRecord:
    t_us: int
    dir: str
    size: int
    outcome: str
    port: int
    t_deliver_us: int | None = None
    kind: str = ""
    retransmit: bool = False
    pass_index: int = -1
    payload_size: int = 0

    def to_dict(self) -> dict[str, object]:
        return asdict(self)


@dataclass
class SimTrace:
    records: list[TraceRecord] = field(default_factory=list)

    def append(self, record: TraceRecord) -> None:
        if self.records and record.t_us < self.records[-1].t_us:
            raise ValueError("Trace times must be non-decreasing.")
        self.records.append(record)

    def __iter__(self):  # type: ignore[no-untyped-def]
        return iter(self.records)

    def __len__(self) -> int:
        return len(self.records)

    def outcome_counts(self) -> dict[str, int]:
        counts = Counter(record.outcome for record in self.records)
        return {outcome: counts.get(outcome, 0) for outcome in OUTCOMES}

    def to_ndjson(self) -> str:
        return "".join(
            json.dumps(record.to_dict(), sort_keys=True) + "\n"
            for record in self.records
        )
