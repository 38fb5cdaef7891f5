from __future__ import annotations

import logging
from pathlib import Path
from typing import TYPE_CHECKING

from orbitkem.constants import EXIT_FAILURE, EXIT_OK, EXIT_USAGE
from orbitkem.kem import (
    KatFormatError,
    format_kat_file,
    generate_vectors,
    read_kat_file,
    run_vector,
)
from orbitkem.models import KatRow

if TYPE_CHECKING:
    from groundstation import GroundStationApp

logger = logging.getLogger(__name__)


class KatService:
    def __init__(self, app: "GroundStationApp") -> None:
        self.app = app

    def check_file(self, path: Path) -> int:
        try:
            vectors = read_kat_file(path)
        except KatFormatError as exc:
            self.app.view.error(str(exc))
            return EXIT_USAGE
        if not vectors:
            self.app.view.error(f"KAT file {path} holds no vectors.")
            return EXIT_USAGE

        rows = [KatRow(**vars(run_vector(vector))) for vector in vectors]
        failed = [row for row in rows if not row.passed]
        result = {
            "file": str(path),
            "vectors": len(rows),
            "passed": len(rows) - len(failed),
            "failed": len(failed),
            "failed_counts": [row.count for row in failed],
        }
        self.app.report_service.emit("kat", result, [row.model_dump() for row in rows])
        if failed:
            self.app.view.table(
                "KAT failures",
                [{"count": r.count, "mismatches": r.mismatches} for r in failed],
            )
        self.app.view.message(f"KAT {path}: {result['passed']}/{len(rows)} passed")
        return EXIT_FAILURE if failed else EXIT_OK

    def generate(self, count: int, output: Path) -> int:
        if count < 1:
            self.app.view.error("--generate needs a vector count of at least 1.")
            return EXIT_USAGE
        vectors = generate_vectors(count)
        self.app.report_repository.write_text_atomic(output, format_kat_file(vectors))
        logger.info("Generated %d KAT vectors into %s", count, output)
        self.app.view.message(f"Wrote {count} vectors to {output}")
        return EXIT_OK
