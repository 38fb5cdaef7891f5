"""CSP-style packets: 32-bit header, optional CRC-32 and truncated HMAC trailers.

Wire layout: header (4, big-endian) || payload || [CRC-32 (4)] || [HMAC (4)].
The CRC covers header and payload. The HMAC covers header and payload by
default, or the payload alone when the scope is "payload" (strict libcsp).
"""

from __future__ import annotations

import hmac as hmac_compare
import logging
import zlib
from dataclasses import dataclass, field

from cryptography.hazmat.primitives import hashes
from cryptography.hazmat.primitives import hmac as crypto_hmac

from orbitkem.constants import (
    CSP_CRC_BYTES,
    CSP_DEFAULT_MTU,
    CSP_FLAG_CRC,
    CSP_FLAG_HMAC,
    CSP_HEADER_BYTES,
    CSP_HMAC_ALGORITHMS,
    CSP_HMAC_BYTES,
    CSP_HMAC_SCOPES,
    CSP_MAX_ADDRESS,
    CSP_MAX_PORT,
    CSP_MAX_PRIORITY,
)
from orbitkem.link.errors import (
    BadCrc,
    BadHmac,
    HeaderFieldError,
    MissingHmacKey,
    PayloadTooLarge,
    Truncated,
)

logger = logging.getLogger(__name__)

# (name, width) from most- to least-significant bit
HEADER_LAYOUT = (
    ("priority", 2),
    ("source", 5),
    ("destination", 5),
    ("destination_port", 6),
    ("source_port", 6),
    ("reserved", 4),
    ("flags", 4),
)
_HASHES = {"sha1": hashes.SHA1, "sha256": hashes.SHA256}


@dataclass(frozen=True)
class CspHeader:
    priority: int = 0
    source: int = 0
    destination: int = 0
    destination_port: int = 0
    source_port: int = 0
    flags: int = 0

    def __post_init__(self) -> None:
        limits = {
            "priority": CSP_MAX_PRIORITY,
            "source": CSP_MAX_ADDRESS,
            "destination": CSP_MAX_ADDRESS,
            "destination_port": CSP_MAX_PORT,
            "source_port": CSP_MAX_PORT,
            "flags": 0x0F,
        }
        for name, limit in limits.items():
            value = getattr(self, name)
            if not 0 <= value <= limit:
                raise HeaderFieldError(
                    f"Header field {name}={value} outside 0..{limit}."
                )

    @property
    def has_crc(self) -> bool:
        return bool(self.flags & CSP_FLAG_CRC)

    @property
    def has_hmac(self) -> bool:
        return bool(self.flags & CSP_FLAG_HMAC)


def pack_header(header: CspHeader) -> bytes:
    word = 0
    for name, width in HEADER_LAYOUT:
        value = 0 if name == "reserved" else getattr(header, name)
        word = (word << width) | value
    return word.to_bytes(CSP_HEADER_BYTES, "big")


def unpack_header(data: bytes) -> CspHeader:
    if len(data) < CSP_HEADER_BYTES:
        raise Truncated("Packet shorter than the 4-byte header.")
    word = int.from_bytes(data[:CSP_HEADER_BYTES], "big")
    shift = 32
    fields: dict[str, int] = {}
    for name, width in HEADER_LAYOUT:
        shift -= width
        fields[name] = (word >> shift) & ((1 << width) - 1)
    fields.pop("reserved")
    return CspHeader(**fields)


def crc32(data: bytes) -> int:
    return zlib.crc32(data) & 0xFFFFFFFF


def hmac_tag(key: bytes, data: bytes, algorithm: str = "sha1") -> bytes:
    """Full-length HMAC tag; the wire carries its first 4 bytes."""
    if algorithm not in CSP_HMAC_ALGORITHMS:
        raise ValueError(f"Unsupported HMAC algorithm '{algorithm}'.")
    mac = crypto_hmac.HMAC(key, _HASHES[algorithm]())
    mac.update(data)
    return mac.finalize()


@dataclass(frozen=True)
class CspPacket:
    header: CspHeader
    payload: bytes
    crc: bytes | None = None
    hmac: bytes | None = None
    raw_header: bytes | None = None

    def to_bytes(self) -> bytes:
        head = self.raw_header
        if head is None:
            head = pack_header(self.header)
        return head + self.payload + (self.crc or b"") + (self.hmac or b"")

    def __len__(self) -> int:
        return len(self.to_bytes())

    @classmethod
    def from_bytes(cls, data: bytes) -> "CspPacket":
        """Split wire bytes according to the header flags; no trailer is checked."""
        header = unpack_header(data)
        trailer = (CSP_CRC_BYTES if header.has_crc else 0) + (
            CSP_HMAC_BYTES if header.has_hmac else 0
        )
        if len(data) < CSP_HEADER_BYTES + trailer:
            raise Truncated(
                f"Packet of {len(data)} bytes cannot hold the flagged trailers."
            )
        end = len(data) - trailer
        payload = data[CSP_HEADER_BYTES:end]
        pos = end
        crc = hmac = None
        if header.has_crc:
            crc = data[pos : pos + CSP_CRC_BYTES]
            pos += CSP_CRC_BYTES
        if header.has_hmac:
            hmac = data[pos : pos + CSP_HMAC_BYTES]
        return cls(header, payload, crc, hmac, raw_header=data[:CSP_HEADER_BYTES])


@dataclass
class LinkStats:
    sealed: int = 0
    verified: int = 0
    bad_crc: int = 0
    bad_hmac: int = 0
    truncated: int = 0
    extra: dict[str, int] = field(default_factory=dict)

    def snapshot(self) -> "LinkStats":
        return LinkStats(
            sealed=self.sealed,
            verified=self.verified,
            bad_crc=self.bad_crc,
            bad_hmac=self.bad_hmac,
            truncated=self.truncated,
            extra=dict(self.extra),
        )

    @property
    def rejected(self) -> int:
        return self.bad_crc + self.bad_hmac + self.truncated


def _hmac_input(head: bytes, payload: bytes, scope: str) -> bytes:
    if scope not in CSP_HMAC_SCOPES:
        raise ValueError(f"Unsupported HMAC scope '{scope}'.")
    return payload if scope == "payload" else head + payload


def seal(
    header: CspHeader,
    payload: bytes,
    *,
    crc_on: bool = False,
    hmac_key: bytes | None = None,
    mtu: int = CSP_DEFAULT_MTU,
    hmac_alg: str = "sha1",
    hmac_scope: str = "header",
    stats: LinkStats | None = None,
) -> CspPacket:
    """Set the trailer flags, then append CRC and HMAC over the final header."""
    if len(payload) > mtu:
        raise PayloadTooLarge(f"Payload of {len(payload)} bytes exceeds MTU {mtu}.")
    wants_hmac = header.has_hmac or hmac_key is not None
    if wants_hmac and not hmac_key:
        raise MissingHmacKey("HMAC flag requested without a key.")
    flags = header.flags & ~(CSP_FLAG_CRC | CSP_FLAG_HMAC)
    if crc_on or header.has_crc:
        flags |= CSP_FLAG_CRC
    if wants_hmac:
        flags |= CSP_FLAG_HMAC
    final = CspHeader(
        priority=header.priority,
        source=header.source,
        destination=header.destination,
        destination_port=header.destination_port,
        source_port=header.source_port,
        flags=flags,
    )
    head = pack_header(final)
    crc = None
    if final.has_crc:
        crc = crc32(head + payload).to_bytes(CSP_CRC_BYTES, "big")
    tag = None
    if hmac_key:
        tag = hmac_tag(hmac_key, _hmac_input(head, payload, hmac_scope), hmac_alg)[
            :CSP_HMAC_BYTES
        ]
    if stats is not None:
        stats.sealed += 1
    return CspPacket(final, payload, crc, tag, raw_header=head)


def verify(
    packet: CspPacket | bytes,
    hmac_key: bytes | None = None,
    *,
    require_crc: bool = False,
    hmac_alg: str = "sha1",
    hmac_scope: str = "header",
    stats: LinkStats | None = None,
) -> bytes:
    """Return the payload iff every present trailer validates.

    With a key given, a packet lacking the HMAC flag is rejected as BadHmac.
    """
    try:
        if isinstance(packet, bytes):
            packet = CspPacket.from_bytes(packet)
        header = packet.header
        if header.has_crc and (packet.crc is None or len(packet.crc) != CSP_CRC_BYTES):
            raise Truncated("CRC flag set but trailer missing.")
        if header.has_hmac and (
            packet.hmac is None or len(packet.hmac) != CSP_HMAC_BYTES
        ):
            raise Truncated("HMAC flag set but trailer missing.")
        if hmac_key is not None and not header.has_hmac:
            raise BadHmac("Packet is not authenticated.")
        if require_crc and not header.has_crc:
            raise BadCrc("Packet carries no CRC.")
        head = packet.raw_header
        if head is None:
            head = pack_header(header)
        if header.has_crc:
            expected_crc = crc32(head + packet.payload).to_bytes(CSP_CRC_BYTES, "big")
            if not hmac_compare.compare_digest(expected_crc, packet.crc or b""):
                raise BadCrc("CRC-32 mismatch.")
        if header.has_hmac:
            if not hmac_key:
                raise MissingHmacKey("Packet is authenticated but no key was given.")
            expected_tag = hmac_tag(
                hmac_key, _hmac_input(head, packet.payload, hmac_scope), hmac_alg
            )[:CSP_HMAC_BYTES]
            if not hmac_compare.compare_digest(expected_tag, packet.hmac or b""):
                raise BadHmac("HMAC tag mismatch.")
    except Truncated:
        if stats is not None:
            stats.truncated += 1
        raise
    except BadCrc:
        if stats is not None:
            stats.bad_crc += 1
        raise
    except BadHmac:
        if stats is not None:
            stats.bad_hmac += 1
        raise
    except MissingHmacKey:
        if stats is not None:
            stats.extra["missing_key"] = stats.extra.get("missing_key", 0) + 1
        raise
    if stats is not None:
        stats.verified += 1
    return packet.payload
