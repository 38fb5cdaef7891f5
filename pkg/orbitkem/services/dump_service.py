from __future__ import annotations

from typing import TYPE_CHECKING

from orbitkem.constants import EXIT_FAILURE, EXIT_OK, EXIT_USAGE
from orbitkem.link import LinkError, dump_packet

if TYPE_CHECKING:
    from groundstation import GroundStationApp


def _hex(text: str) -> bytes:
    return bytes.fromhex("".join(text.split()).removeprefix("0x"))


class DumpService:
    def __init__(self, app: "GroundStationApp") -> None:
        self.app = app

    def run(self, packet_hex: str, key_hex: str | None = None) -> int:
        try:
            data = _hex(packet_hex)
            key = _hex(key_hex) if key_hex else None
        except ValueError as exc:
            self.app.view.error(f"Not a hex string: {exc}")
            return EXIT_USAGE
        config = self.app.config
        try:
            rows = dump_packet(
                data, key, hmac_alg=config.hmac_alg, hmac_scope=config.hmac_scope
            )
        except LinkError as exc:
            self.app.view.error(f"{type(exc).__name__}: {exc}")
            return EXIT_FAILURE
        self.app.report_service.emit(
            "dump-packet",
            {"length": len(data)},
            [{"field": row.field, "value": row.value} for row in rows],
        )
        self.app.view.pairs("CSP packet", [(row.field, row.value) for row in rows])
        status = rows[-1].value
        if status.startswith(("ok", "crc ok", "hmac not")):
            return EXIT_OK
        return EXIT_FAILURE
