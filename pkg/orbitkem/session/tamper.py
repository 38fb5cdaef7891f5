"""Single-bit tamper sweep comparing authenticated GCM frames with legacy XTEA-CTR."""

from __future__ import annotations

import logging
from dataclasses import dataclass

from orbitkem.session.errors import AuthFail
from orbitkem.session.frames import FrameOpener, SecureFrame, encrypt_frame
from orbitkem.session.keys import SessionKeys
from orbitkem.session.xtea import legacy_open, legacy_seal

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class TamperResult:
    mode: str
    flips: int
    detected: int

    @property
    def detection_rate(self) -> float:
        return self.detected / self.flips if self.flips else 0.0


def _flip(data: bytes, bit: int) -> bytes:
    out = bytearray(data)
    out[bit // 8] ^= 1 << (bit % 8)
    return bytes(out)


def tamper_sweep(
    keys: SessionKeys, plaintext: bytes, aad: bytes = b"", sequence: int = 0
) -> tuple[TamperResult, TamperResult]:
    """Flip every bit of one frame in turn; count flips the receiver notices.

    A legacy frame counts as detected only if opening it raises. XTEA-CTR has
    no integrity check, so every flip is silently accepted.
    """
    wire = encrypt_frame(keys, sequence, plaintext, aad).to_bytes()
    gcm_detected = 0
    for bit in range(len(wire) * 8):
        try:
            FrameOpener(keys).open(SecureFrame.from_bytes(_flip(wire, bit)), aad)
        except AuthFail:
            gcm_detected += 1
    legacy = legacy_seal(keys.xtea_key, sequence, plaintext)
    legacy_detected = 0
    for bit in range(len(legacy) * 8):
        try:
            legacy_open(keys.xtea_key, _flip(legacy, bit))
        except ValueError:
            legacy_detected += 1
    logger.info(
        "Tamper sweep: gcm %d/%d, xtea-ctr %d/%d",
        gcm_detected,
        len(wire) * 8,
        legacy_detected,
        len(legacy) * 8,
    )
    return (
        TamperResult("aes-256-gcm", len(wire) * 8, gcm_detected),
        TamperResult("xtea-ctr", len(legacy) * 8, legacy_detected),
    )
