from __future__ import annotations

import logging
import platform
import sys
from pathlib import Path
from typing import TYPE_CHECKING, Any

import cryptography

from orbitkem import __version__
from orbitkem.constants import TRACE_SCHEMA_VERSION
from orbitkem.models import ReportEnvelope
from orbitkem.sim.trace import SimTrace

if TYPE_CHECKING:
    from groundstation import GroundStationApp

logger = logging.getLogger(__name__)


class ReportService:
    def __init__(self, app: "GroundStationApp") -> None:
        self.app = app

    def describe_environment(self) -> dict[str, str]:
        if not self.app.environment:
            self.app.environment.update(
                {
                    "python": sys.version.split()[0],
                    "implementation": platform.python_implementation(),
                    "platform": platform.platform(),
                    "machine": platform.machine(),
                    "cryptography": cryptography.__version__,
                    "orbitkem": __version__,
                }
            )
        return dict(self.app.environment)

    def build_envelope(
        self,
        command: str,
        result: dict[str, Any] | None = None,
        rows: list[dict[str, Any]] | None = None,
    ) -> dict[str, Any]:
        envelope = ReportEnvelope(
            command=command,
            config=self.app.config,
            environment=self.describe_environment(),
            result=result or {},
            rows=rows or [],
        )
        return envelope.model_dump(mode="json")

    def emit(
        self,
        command: str,
        result: dict[str, Any] | None = None,
        rows: list[dict[str, Any]] | None = None,
    ) -> dict[str, Any]:
        """Build the report envelope and write it when an output path is configured."""
        envelope = self.build_envelope(command, result, rows)
        self.app.last_envelope = envelope
        output = self.app.config.output
        if output:
            path = Path(output)
            self.app.report_repository.write_report(
                path, envelope, self.app.config.report_format
            )
            self.app.reports_written.append(str(path))
            logger.info("Wrote %s report to %s", command, path)
        return envelope

    def export_trace(self, path: Path, trace: SimTrace, run_seed: int) -> bool:
        rows = [
            {"schema_version": TRACE_SCHEMA_VERSION, "seed": run_seed, "kind": "header"}
        ]
        rows.extend(record.to_dict() for record in trace)
        ok = self.app.report_repository.append_ndjson(path, rows)
        if ok:
            logger.info("Appended %d trace records to %s", len(trace), path)
        return ok
