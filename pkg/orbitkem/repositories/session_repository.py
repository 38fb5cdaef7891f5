from __future__ import annotations

import os
from pathlib import Path
from uuid import uuid4


class SessionRepository:
    """Handshake snapshots on disk, one binary blob per file."""

    def save_snapshot(self, path: Path, blob: bytes) -> None:
        path.parent.mkdir(parents=True, exist_ok=True)
        tmp_path = path.with_name(f".{path.name}.tmp-{os.getpid()}-{uuid4().hex[:8]}")
        try:
            with open(tmp_path, "wb") as f:
                f.write(blob)
                f.flush()
                os.fsync(f.fileno())
            os.replace(tmp_path, path)
        finally:
            try:
                tmp_path.unlink(missing_ok=True)
            except OSError:
                pass

    def load_snapshot(self, path: Path) -> bytes:
        return path.read_bytes()
