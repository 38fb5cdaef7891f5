from __future__ import annotations

import logging
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from statistics import fmean
from typing import TYPE_CHECKING, Any

from pydantic import ValidationError

from orbitkem.constants import EXIT_FAILURE, EXIT_OK, EXIT_USAGE
from orbitkem.handshake import (
    HandshakeConfig,
    HandshakeSession,
    Role,
    restore_session,
    snapshot_session,
)
from orbitkem.models import RunConfig, SweepSummary
from orbitkem.sim import (
    ExchangeConfig,
    ExchangeResult,
    HorizonExhausted,
    LinkModel,
    PassSchedule,
    run_exchange,
)

if TYPE_CHECKING:
    from groundstation import GroundStationApp

logger = logging.getLogger(__name__)


def exchange_config(config: RunConfig, seed: int) -> ExchangeConfig:
    """Translate the flat run configuration into one simulated exchange."""
    return ExchangeConfig(
        handshake=HandshakeConfig(
            party="ground",
            role=Role(config.ground_role),
            mtu=config.mtu,
            crc_on=config.crc,
            hmac_on=config.hmac,
            hmac_alg=config.hmac_alg,
            hmac_scope=config.hmac_scope,
        ),
        schedule=PassSchedule(
            orbit_period_s=config.orbit_period_s,
            pass_duration_s=config.pass_duration_s,
            start_offset_s=config.start_offset_s,
        ),
        link=LinkModel(
            data_rate_bps=config.rate,
            loss_prob=config.loss,
            corrupt_prob=config.corrupt,
            turnaround_ms=config.turnaround_ms,
            rng_seed=seed,
        ),
        horizon_s=config.horizon_s,
        data_frames=config.data_frames,
    )


def run_seed(config: ExchangeConfig) -> ExchangeResult:
    try:
        return run_exchange(config)
    except HorizonExhausted as exc:
        logger.info("Seed %d: %s", config.link.rng_seed, exc)
        return exc.result


def failure_label(result: ExchangeResult) -> str | None:
    if result.established:
        return None
    for session in (result.ground, result.satellite):
        if session.failure is not None:
            return session.failure.value
    return "HorizonExhausted"


def summarize(results: list[tuple[int, ExchangeResult]]) -> SweepSummary:
    established = [r for _, r in results if r.established]
    histogram = Counter(r.passes_used for r in established)
    failures = Counter(
        label for _, r in results if (label := failure_label(r)) is not None
    )
    return SweepSummary(
        runs=len(results),
        established=len(established),
        success_rate=len(established) / len(results) if results else 0.0,
        pass_histogram={str(k): histogram[k] for k in sorted(histogram)},
        mean_retransmissions=(
            fmean(r.report.retransmissions for _, r in results) if results else 0.0
        ),
        failures=dict(sorted(failures.items())),
    )


def result_row(seed: int, result: ExchangeResult) -> dict[str, Any]:
    return {
        "seed": seed,
        "established": result.established,
        "passes_used": result.passes_used,
        "established_at_s": (
            None if result.established_at_us is None else result.established_at_us / 1e6
        ),
        "packets": result.report.packets,
        "retransmissions": result.report.retransmissions,
        "uplink_bytes": result.report.uplink_bytes,
        "downlink_bytes": result.report.downlink_bytes,
        "failure": failure_label(result),
    }


class ExchangeService:
    def __init__(self, app: "GroundStationApp") -> None:
        self.app = app

    def build_configs(self) -> list[ExchangeConfig]:
        config = self.app.config
        return [
            exchange_config(config, seed)
            for seed in range(config.seed, config.seed + config.seeds)
        ]

    def sweep(self, configs: list[ExchangeConfig]) -> list[tuple[int, ExchangeResult]]:
        workers = min(self.app.config.workers, len(configs))
        if workers <= 1:
            results = [run_seed(c) for c in configs]
        else:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                results = list(pool.map(run_seed, configs))
        return [(c.link.rng_seed, r) for c, r in zip(configs, results)]

    def save_snapshots(
        self, directory: Path, seed: int, result: ExchangeResult
    ) -> None:
        for party, session in (
            ("ground", result.ground),
            ("satellite", result.satellite),
        ):
            path = directory / f"seed{seed}-{party}.okhs"
            self.app.session_repository.save_snapshot(path, snapshot_session(session))
            logger.info("Saved %s snapshot to %s", party, path)

    def load_snapshot(self, path: Path) -> HandshakeSession:
        session = restore_session(self.app.session_repository.load_snapshot(path))
        logger.info(
            "Loaded %s snapshot from %s (%s)",
            session.config.party,
            path,
            session.state.value,
        )
        return session

    def run(self) -> int:
        try:
            configs = self.build_configs()
        except ValidationError as exc:
            self.app.view.error(f"Invalid exchange configuration: {exc}")
            return EXIT_USAGE

        results = self.sweep(configs)
        first_seed, first = results[0]
        if self.app.config.trace:
            self.app.report_service.export_trace(
                Path(self.app.config.trace), first.trace, first_seed
            )
        if self.app.config.snapshot_dir:
            self.save_snapshots(Path(self.app.config.snapshot_dir), first_seed, first)

        rows = [result_row(seed, result) for seed, result in results]
        if len(results) == 1:
            result_doc = first.summary()
            self.app.view.pairs(
                f"Exchange seed {first_seed}",
                [(k, v) for k, v in result_doc.items() if k != "accounting"],
            )
            self.app.view.pairs("Accounting", list(first.report.model_dump().items()))
        else:
            summary = summarize(results)
            result_doc = summary.model_dump()
            self.app.view.table("Exchange sweep", rows)
            self.app.view.pairs("Sweep summary", list(result_doc.items()))
        self.app.report_service.emit("exchange", result_doc, rows)
        return EXIT_OK if all(r.established for _, r in results) else EXIT_FAILURE
