from __future__ import annotations

import logging
from pathlib import Path
from typing import Any

from orbitkem.constants import CONFIG_FILE
from orbitkem.models import ConfigError, RunConfig

logger = logging.getLogger(__name__)


class ConfigRepository:
    """Reads `key = value` run configuration files.

    Lines starting with `#` and blank lines are skipped. Keys are RunConfig
    field names (dashes allowed in place of underscores); unknown keys are an
    error. Values stay strings here and are coerced when RunConfig validates.
    """

    def load_config(self, path: Path | None = None) -> dict[str, Any]:
        explicit = path is not None
        target = path if path is not None else Path(CONFIG_FILE)
        if not target.exists():
            if explicit:
                raise ConfigError(f"Config file {target} does not exist.")
            return {}
        try:
            text = target.read_text(encoding="utf-8")
        except (OSError, UnicodeDecodeError) as exc:
            if explicit:
                raise ConfigError(f"Cannot read config file {target}: {exc}") from exc
            logger.warning("Failed to load config from %s: %s", target, exc)
            return {}
        return self.parse(text, source=str(target))

    def parse(self, text: str, source: str = "<config>") -> dict[str, Any]:
        known = set(RunConfig.model_fields)
        values: dict[str, Any] = {}
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            key, sep, value = line.partition("=")
            if not sep:
                raise ConfigError(f"{source}:{lineno}: expected 'key = value'.")
            key = key.strip().replace("-", "_")
            if key not in known or key == "command":
                raise ConfigError(f"{source}:{lineno}: unknown key '{key}'.")
            values[key] = value.strip()
        return values
