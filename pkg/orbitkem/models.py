from __future__ import annotations

from datetime import datetime, timezone
from typing import Any, Literal

from pydantic import BaseModel, ConfigDict, Field, field_validator

from orbitkem import __version__
from orbitkem.constants import (
    BENCH_DEFAULT_ITERATIONS,
    BENCH_OPERATIONS,
    CSP_DEFAULT_MTU,
    CSP_MAX_MTU,
    CSP_MIN_MTU,
    DEFAULT_DATA_FRAMES,
    DEFAULT_DATA_RATE_BPS,
    DEFAULT_HORIZON_S,
    DEFAULT_ORBIT_PERIOD_S,
    DEFAULT_PASS_DURATION_S,
    DEFAULT_START_OFFSET_S,
    DEFAULT_TURNAROUND_MS,
    MAX_SWEEP_WORKERS,
    REPORT_SCHEMA_VERSION,
)


class ConfigError(ValueError):
    pass


class RunConfig(BaseModel):
    """Every knob of a run; embedded verbatim in each report."""

    model_config = ConfigDict(extra="forbid")

    command: str = ""
    seed: int = Field(default=0, ge=0, lt=1 << 64)
    seeds: int = Field(default=1, ge=1)
    workers: int = Field(default=1, ge=1, le=MAX_SWEEP_WORKERS)
    mtu: int = Field(default=CSP_DEFAULT_MTU, ge=CSP_MIN_MTU, le=CSP_MAX_MTU)
    loss: float = Field(default=0.0, ge=0.0, lt=1.0)
    corrupt: float = Field(default=0.0, ge=0.0, lt=1.0)
    rate: int = Field(default=DEFAULT_DATA_RATE_BPS, gt=0)
    turnaround_ms: int = Field(default=DEFAULT_TURNAROUND_MS, ge=0)
    orbit_period_s: int = Field(default=DEFAULT_ORBIT_PERIOD_S, gt=0)
    pass_duration_s: int = Field(default=DEFAULT_PASS_DURATION_S, gt=0)
    start_offset_s: int = Field(default=DEFAULT_START_OFFSET_S, ge=0)
    horizon_s: int = Field(default=DEFAULT_HORIZON_S, gt=0)
    ground_role: Literal["key_holder", "encapsulator"] = "key_holder"
    crc: bool = True
    hmac: bool = True
    hmac_alg: Literal["sha1", "sha256"] = "sha1"
    hmac_scope: Literal["header", "payload"] = "header"
    data_frames: int = Field(default=DEFAULT_DATA_FRAMES, ge=0)
    iterations: int = Field(default=BENCH_DEFAULT_ITERATIONS, ge=1)
    ops: list[str] = Field(default_factory=lambda: list(BENCH_OPERATIONS))
    report_format: Literal["json", "csv"] = "json"
    output: str | None = None
    trace: str | None = None
    snapshot_dir: str | None = None

    @field_validator("ops", mode="before")
    @classmethod
    def _split_ops(cls, value: Any) -> Any:
        if isinstance(value, str):
            return [item.strip() for item in value.split(",") if item.strip()]
        return value

    @field_validator("ops")
    @classmethod
    def _known_ops(cls, value: list[str]) -> list[str]:
        unknown = [op for op in value if op not in BENCH_OPERATIONS]
        if unknown:
            raise ValueError(f"Unknown bench operation(s): {', '.join(unknown)}")
        if not value:
            raise ValueError("At least one bench operation is required.")
        return value


class ReportEnvelope(BaseModel):
    schema_version: int = REPORT_SCHEMA_VERSION
    version: str = __version__
    command: str
    generated_at: str = Field(
        default_factory=lambda: datetime.now(timezone.utc).isoformat(timespec="seconds")
    )
    config: RunConfig
    environment: dict[str, str] = Field(default_factory=dict)
    result: dict[str, Any] = Field(default_factory=dict)
    rows: list[dict[str, Any]] = Field(default_factory=list)


class KatRow(BaseModel):
    count: int
    passed: bool
    mismatches: list[str] = Field(default_factory=list)


class KeystoreRow(BaseModel):
    n: int
    pairwise_keys: int
    pk_keys: int
    pairwise_storage_bytes: int
    pk_storage_bytes: int
    pairwise_per_node_bytes: int
    pk_per_node_bytes: int


class BenchRow(BaseModel):
    name: str
    iterations: int
    median_us: float
    mean_us: float
    p95_us: float
    bytes_processed: int = 0
    informational: bool = False


class BenchReport(BaseModel):
    rows: list[BenchRow] = Field(default_factory=list)
    decaps_encaps_ratio: float | None = None
    tamper: dict[str, float] = Field(default_factory=dict)
    environment: dict[str, str] = Field(default_factory=dict)


class SweepSummary(BaseModel):
    runs: int
    established: int
    success_rate: float
    pass_histogram: dict[str, int] = Field(default_factory=dict)
    mean_retransmissions: float = 0.0
    failures: dict[str, int] = Field(default_factory=dict)
