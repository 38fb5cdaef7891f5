from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

from orbitkem.constants import EXIT_OK
from orbitkem.models import RunConfig


@dataclass
class AppState:
    config: RunConfig = field(default_factory=RunConfig)
    verbosity: int = 0
    exit_code: int = EXIT_OK
    last_envelope: dict[str, Any] | None = None
    reports_written: list[str] = field(default_factory=list)
    environment: dict[str, str] = field(default_factory=dict)

    def apply_to(self, app: Any) -> None:
        app.config = self.config
        app.verbosity = self.verbosity
        app.exit_code = self.exit_code
        app.last_envelope = self.last_envelope
        app.reports_written = self.reports_written
        app.environment = self.environment
