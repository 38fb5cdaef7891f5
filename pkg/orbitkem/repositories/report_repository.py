from __future__ import annotations

import csv
import io
import json
import logging
import os
import random
import time
from pathlib import Path
from typing import Any
from uuid import uuid4

import portalocker

from orbitkem.constants import (
    LOCK_BACKOFF_BASE_SECONDS,
    LOCK_BACKOFF_MAX_SECONDS,
    LOCK_MAX_ATTEMPTS,
    LOCK_TIMEOUT_SECONDS,
)

logger = logging.getLogger(__name__)


def _flatten(row: dict[str, Any]) -> dict[str, Any]:
    flat: dict[str, Any] = {}
    for key, value in row.items():
        if isinstance(value, (dict, list)):
            flat[key] = json.dumps(value, sort_keys=True)
        else:
            flat[key] = value
    return flat


class ReportRepository:
    def write_text_atomic(self, path: Path, text: str) -> None:
        path.parent.mkdir(parents=True, exist_ok=True)
        tmp_path = path.with_name(f".{path.name}.tmp-{os.getpid()}-{uuid4().hex[:8]}")
        try:
            with open(tmp_path, "w", encoding="utf-8", newline="") as f:
                f.write(text)
                f.flush()
                os.fsync(f.fileno())
            os.replace(tmp_path, path)
        finally:
            try:
                tmp_path.unlink(missing_ok=True)
            except OSError:
                pass

    def render_csv(self, envelope: dict[str, Any]) -> str:
        """Table rows as CSV, preceded by `#` lines carrying version and config."""
        out = io.StringIO()
        out.write(f"# version={envelope.get('version', '')}\n")
        config = json.dumps(envelope.get("config", {}), sort_keys=True)
        out.write(f"# config={config}\n")
        rows = [_flatten(row) for row in envelope.get("rows", [])]
        if not rows and envelope.get("result"):
            rows = [_flatten(envelope["result"])]
        if rows:
            writer = csv.DictWriter(out, fieldnames=list(rows[0]), lineterminator="\n")
            writer.writeheader()
            writer.writerows(rows)
        return out.getvalue()

    def write_report(
        self, path: Path, envelope: dict[str, Any], report_format: str
    ) -> None:
        if report_format == "csv":
            text = self.render_csv(envelope)
        else:
            text = json.dumps(envelope, indent=2, sort_keys=True) + "\n"
        self.write_text_atomic(path, text)

    def append_ndjson(self, path: Path, rows: list[dict[str, Any]]) -> bool:
        path.parent.mkdir(parents=True, exist_ok=True)
        body = "".join(json.dumps(row, sort_keys=True) + "\n" for row in rows)
        for attempt in range(LOCK_MAX_ATTEMPTS):
            try:
                with portalocker.Lock(
                    str(path),
                    mode="a",
                    timeout=LOCK_TIMEOUT_SECONDS,
                    fail_when_locked=True,
                    encoding="utf-8",
                ) as f:
                    f.write(body)
                    f.flush()
                    os.fsync(f.fileno())
                return True
            except portalocker.exceptions.LockException:
                pass
            except OSError as exc:
                logger.warning("Failed appending to %s: %s", path, exc)
                return False
            if attempt == LOCK_MAX_ATTEMPTS - 1:
                break
            delay = min(
                LOCK_BACKOFF_MAX_SECONDS,
                LOCK_BACKOFF_BASE_SECONDS * (2 ** min(attempt, 5)),
            )
            time.sleep(delay + random.uniform(0, 0.03))
        logger.warning("Gave up appending to %s: file stayed locked.", path)
        return False
