"""Versioned binary snapshots of a handshake session, for resuming between passes.

Layout: magic "OKHS" || version (1) || field count (2) || fields, each as
length (4, big-endian) || bytes, in FIELD_ORDER. Optional byte fields are
empty when unset; reassembly buffers and counters are JSON documents.
"""

from __future__ import annotations

import json
import struct
from typing import Any

from orbitkem.constants import SNAPSHOT_MAGIC, SNAPSHOT_VERSION
from orbitkem.handshake.config import HandshakeConfig
from orbitkem.handshake.errors import HandshakeError
from orbitkem.handshake.session import FailureReason, HandshakeSession, HandshakeState
from orbitkem.link.csp import LinkStats
from orbitkem.link.fragment import Reassembler

FIELD_ORDER = (
    "config",
    "state",
    "failure",
    "keygen_seed",
    "encaps_seed",
    "public_key",
    "secret_key",
    "ciphertext",
    "shared_secret",
    "pending_secret",
    "transcript_hash",
    "confirm_sent",
    "pk_rx",
    "ct_rx",
    "counters",
)
_OPTIONAL_BYTES = (
    "public_key",
    "secret_key",
    "ciphertext",
    "shared_secret",
    "pending_secret",
    "confirm_sent",
)


class SnapshotError(HandshakeError):
    pass


def _buffer_doc(buffer: Reassembler) -> bytes:
    doc = {
        "transfer_id": buffer.transfer_id,
        "total": buffer.total,
        "chunks": {str(i): chunk.hex() for i, chunk in sorted(buffer.chunks.items())},
    }
    return json.dumps(doc, sort_keys=True).encode("utf-8")


def _buffer_from(doc: dict[str, Any]) -> Reassembler:
    return Reassembler(
        transfer_id=doc["transfer_id"],
        total=doc["total"],
        chunks={int(i): bytes.fromhex(h) for i, h in doc["chunks"].items()},
    )


def snapshot_session(session: HandshakeSession) -> bytes:
    stats = session.stats
    counters = {
        "retries": session.retries,
        "in_pass": session.in_pass,
        "started_us": session.started_us,
        "last_progress_us": session.last_progress_us,
        "last_request_us": session.last_request_us,
        "hmac_rejects": session.hmac_rejects,
        "kem_operations": session.kem_operations,
        "passes_seen": session.passes_seen,
        "stats": {
            "sealed": stats.sealed,
            "verified": stats.verified,
            "bad_crc": stats.bad_crc,
            "bad_hmac": stats.bad_hmac,
            "truncated": stats.truncated,
            "extra": stats.extra,
        },
    }
    values: dict[str, bytes] = {
        "config": session.config.model_dump_json().encode("utf-8"),
        "state": session.state.value.encode("ascii"),
        "failure": session.failure.value.encode("ascii") if session.failure else b"",
        "keygen_seed": session.keygen_seed,
        "encaps_seed": session.encaps_seed,
        "transcript_hash": session.transcript_hash,
        "pk_rx": _buffer_doc(session.pk_rx),
        "ct_rx": _buffer_doc(session.ct_rx),
        "counters": json.dumps(counters, sort_keys=True).encode("utf-8"),
    }
    for name in _OPTIONAL_BYTES:
        values[name] = getattr(session, name) or b""
    blob = bytearray(SNAPSHOT_MAGIC)
    blob += struct.pack(">BH", SNAPSHOT_VERSION, len(FIELD_ORDER))
    for name in FIELD_ORDER:
        blob += struct.pack(">I", len(values[name])) + values[name]
    return bytes(blob)


def restore_session(blob: bytes) -> HandshakeSession:
    if blob[: len(SNAPSHOT_MAGIC)] != SNAPSHOT_MAGIC:
        raise SnapshotError("Not a handshake snapshot (bad magic).")
    pos = len(SNAPSHOT_MAGIC)
    try:
        version, count = struct.unpack_from(">BH", blob, pos)
    except struct.error as exc:
        raise SnapshotError("Snapshot header is truncated.") from exc
    if version != SNAPSHOT_VERSION:
        raise SnapshotError(f"Unsupported snapshot version {version}.")
    if count != len(FIELD_ORDER):
        raise SnapshotError(
            f"Snapshot carries {count} fields, expected {len(FIELD_ORDER)}."
        )
    pos += 3
    values: dict[str, bytes] = {}
    for name in FIELD_ORDER:
        try:
            (length,) = struct.unpack_from(">I", blob, pos)
        except struct.error as exc:
            raise SnapshotError(f"Snapshot truncated before field {name}.") from exc
        pos += 4
        if pos + length > len(blob):
            raise SnapshotError(f"Snapshot truncated inside field {name}.")
        values[name] = blob[pos : pos + length]
        pos += length
    if pos != len(blob):
        raise SnapshotError("Trailing bytes after the last snapshot field.")

    try:
        counters = json.loads(values["counters"])
        stats_doc = counters["stats"]
        session = HandshakeSession(
            config=HandshakeConfig.model_validate_json(values["config"]),
            keygen_seed=values["keygen_seed"],
            encaps_seed=values["encaps_seed"],
            state=HandshakeState(values["state"].decode("ascii")),
            failure=(
                FailureReason(values["failure"].decode("ascii"))
                if values["failure"]
                else None
            ),
            pk_rx=_buffer_from(json.loads(values["pk_rx"])),
            ct_rx=_buffer_from(json.loads(values["ct_rx"])),
            transcript_hash=values["transcript_hash"],
            retries={str(k): int(v) for k, v in counters["retries"].items()},
            in_pass=bool(counters["in_pass"]),
            started_us=counters["started_us"],
            last_progress_us=int(counters["last_progress_us"]),
            last_request_us=int(counters["last_request_us"]),
            hmac_rejects=int(counters["hmac_rejects"]),
            kem_operations=int(counters["kem_operations"]),
            passes_seen=int(counters["passes_seen"]),
            stats=LinkStats(
                sealed=stats_doc["sealed"],
                verified=stats_doc["verified"],
                bad_crc=stats_doc["bad_crc"],
                bad_hmac=stats_doc["bad_hmac"],
                truncated=stats_doc["truncated"],
                extra=dict(stats_doc["extra"]),
            ),
        )
    except (ValueError, KeyError, TypeError) as exc:
        raise SnapshotError(f"Snapshot field is malformed: {exc}") from exc
    for name in _OPTIONAL_BYTES:
        setattr(session, name, values[name] or None)
    return session
