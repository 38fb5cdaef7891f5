from __future__ import annotations

# flake8: noqa: E704

from pathlib import Path
from typing import Any, Protocol


class ConfigRepositoryProtocol(Protocol):
    def load_config(self, path: Path | None = None) -> dict[str, Any]: ...


class ReportRepositoryProtocol(Protocol):
    def write_text_atomic(self, path: Path, text: str) -> None: ...

    def write_report(
        self, path: Path, envelope: dict[str, Any], report_format: str
    ) -> None: ...

    def append_ndjson(self, path: Path, rows: list[dict[str, Any]]) -> bool: ...


class SessionRepositoryProtocol(Protocol):
    def save_snapshot(self, path: Path, blob: bytes) -> None: ...

    def load_snapshot(self, path: Path) -> bytes: ...
