"""XTEA block cipher and the unauthenticated CTR framing of the legacy link option."""

from __future__ import annotations

import struct

from orbitkem.constants import (
    FRAME_SEQUENCE_BYTES,
    XTEA_DELTA,
    XTEA_KEY_BYTES,
    XTEA_ROUNDS,
)
from orbitkem.session.errors import BlockLengthError

XTEA_BLOCK_BYTES = 8
_MASK = 0xFFFFFFFF


def _key_words(key: bytes) -> tuple[int, ...]:
    if len(key) != XTEA_KEY_BYTES:
        raise BlockLengthError(f"XTEA key must be {XTEA_KEY_BYTES} bytes.")
    return struct.unpack(">4I", key)


def xtea_encrypt_block(key: bytes, block: bytes, rounds: int = XTEA_ROUNDS) -> bytes:
    k = _key_words(key)
    if len(block) != XTEA_BLOCK_BYTES:
        raise BlockLengthError("XTEA block must be 8 bytes.")
    v0, v1 = struct.unpack(">2I", block)
    total = 0
    for _ in range(rounds):
        v0 = (v0 + ((((v1 << 4) ^ (v1 >> 5)) + v1) ^ (total + k[total & 3]))) & _MASK
        total = (total + XTEA_DELTA) & _MASK
        v1 = (
            v1 + ((((v0 << 4) ^ (v0 >> 5)) + v0) ^ (total + k[(total >> 11) & 3]))
        ) & _MASK
    return struct.pack(">2I", v0, v1)


def xtea_decrypt_block(key: bytes, block: bytes, rounds: int = XTEA_ROUNDS) -> bytes:
    k = _key_words(key)
    if len(block) != XTEA_BLOCK_BYTES:
        raise BlockLengthError("XTEA block must be 8 bytes.")
    v0, v1 = struct.unpack(">2I", block)
    total = (XTEA_DELTA * rounds) & _MASK
    for _ in range(rounds):
        v1 = (
            v1 - ((((v0 << 4) ^ (v0 >> 5)) + v0) ^ (total + k[(total >> 11) & 3]))
        ) & _MASK
        total = (total - XTEA_DELTA) & _MASK
        v0 = (v0 - ((((v1 << 4) ^ (v1 >> 5)) + v1) ^ (total + k[total & 3]))) & _MASK
    return struct.pack(">2I", v0, v1)


def xtea_ctr(key: bytes, sequence: int, data: bytes) -> bytes:
    """Keystream block i encrypts (sequence << 32 | i); encryption equals decryption."""
    out = bytearray()
    for i in range(0, len(data), XTEA_BLOCK_BYTES):
        counter = ((sequence << 32) | (i // XTEA_BLOCK_BYTES)) & ((1 << 64) - 1)
        stream = xtea_encrypt_block(key, counter.to_bytes(XTEA_BLOCK_BYTES, "big"))
        out += bytes(a ^ b for a, b in zip(data[i : i + XTEA_BLOCK_BYTES], stream))
    return bytes(out)


def legacy_seal(key: bytes, sequence: int, plaintext: bytes) -> bytes:
    return sequence.to_bytes(FRAME_SEQUENCE_BYTES, "big") + xtea_ctr(
        key, sequence, plaintext
    )


def legacy_open(key: bytes, frame: bytes) -> bytes:
    if len(frame) < FRAME_SEQUENCE_BYTES:
        raise BlockLengthError("Legacy frame shorter than its sequence field.")
    sequence = int.from_bytes(frame[:FRAME_SEQUENCE_BYTES], "big")
    return xtea_ctr(key, sequence, frame[FRAME_SEQUENCE_BYTES:])
