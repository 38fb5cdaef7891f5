"""Field-by-field decoding of a CSP packet for the dump-packet tool."""

from __future__ import annotations

from dataclasses import dataclass

from orbitkem.constants import (
    CSP_FLAG_CRC,
    CSP_FLAG_HMAC,
    CSP_FLAG_RDP,
    CSP_FLAG_XTEA,
    CSP_HEADER_BYTES,
    FRAGMENT_HEADER_BYTES,
    PORT_CONTROL,
    PORT_CT_FRAGMENT,
    PORT_DATA,
    PORT_PK_FRAGMENT,
)
from orbitkem.link.csp import CspPacket, crc32, verify
from orbitkem.link.errors import LinkError
from orbitkem.link.fragment import Fragment

FLAG_NAMES = (
    (CSP_FLAG_HMAC, "HMAC"),
    (CSP_FLAG_XTEA, "XTEA"),
    (CSP_FLAG_RDP, "RDP"),
    (CSP_FLAG_CRC, "CRC"),
)
PORT_NAMES = {
    PORT_PK_FRAGMENT: "pk-fragment",
    PORT_CT_FRAGMENT: "ct-fragment",
    PORT_CONTROL: "control",
    PORT_DATA: "data",
}


@dataclass(frozen=True)
class DumpRow:
    field: str
    value: str


def flag_names(flags: int) -> str:
    names = [name for bit, name in FLAG_NAMES if flags & bit]
    return "|".join(names) if names else "-"


def dump_packet(
    data: bytes,
    hmac_key: bytes | None = None,
    *,
    hmac_alg: str = "sha1",
    hmac_scope: str = "header",
) -> list[DumpRow]:
    packet = CspPacket.from_bytes(data)
    header = packet.header
    rows = [
        DumpRow("header", data[:CSP_HEADER_BYTES].hex()),
        DumpRow("priority", str(header.priority)),
        DumpRow("source", str(header.source)),
        DumpRow("destination", str(header.destination)),
        DumpRow(
            "destination_port",
            f"{header.destination_port} "
            f"({PORT_NAMES.get(header.destination_port, '?')})",
        ),
        DumpRow("source_port", str(header.source_port)),
        DumpRow("reserved", str((data[3] >> 4) & 0x0F)),
        DumpRow("flags", f"0x{header.flags:X} {flag_names(header.flags)}"),
        DumpRow("payload_length", str(len(packet.payload))),
    ]
    if header.destination_port in (PORT_PK_FRAGMENT, PORT_CT_FRAGMENT) and (
        len(packet.payload) >= FRAGMENT_HEADER_BYTES
    ):
        try:
            frag = Fragment.from_bytes(packet.payload)
        except LinkError as exc:
            rows.append(DumpRow("fragment", f"invalid ({exc})"))
        else:
            rows.append(
                DumpRow(
                    "fragment",
                    f"transfer={frag.header.transfer_id} index={frag.header.index}"
                    f"/{frag.header.total} chunk_len={frag.header.chunk_len}",
                )
            )
    rows.append(DumpRow("payload", packet.payload.hex()))
    if packet.crc is not None:
        rows.append(DumpRow("crc", packet.crc.hex()))
    if packet.hmac is not None:
        rows.append(DumpRow("hmac", packet.hmac.hex()))
    rows.append(
        DumpRow("trailers", _trailer_status(packet, hmac_key, hmac_alg, hmac_scope))
    )
    return rows


def _trailer_status(
    packet: CspPacket, hmac_key: bytes | None, hmac_alg: str, hmac_scope: str
) -> str:
    if packet.hmac is not None and hmac_key is None:
        if packet.crc is None:
            return "hmac not checked (no key)"
        expected = crc32(packet.to_bytes()[: -len(packet.crc) - len(packet.hmac)])
        if expected.to_bytes(4, "big") != packet.crc:
            return "BadCrc: CRC-32 mismatch."
        return "crc ok, hmac not checked (no key)"
    try:
        verify(packet, hmac_key, hmac_alg=hmac_alg, hmac_scope=hmac_scope)
    except LinkError as exc:
        return f"{type(exc).__name__}: {exc}"
    return "ok"
