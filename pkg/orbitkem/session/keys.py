"""Traffic keys derived from the KEM shared secret with HKDF-SHA256."""

from __future__ import annotations

from dataclasses import dataclass

from cryptography.hazmat.primitives import hashes
from cryptography.hazmat.primitives.kdf.hkdf import HKDF

from orbitkem.constants import (
    AES_KEY_BYTES,
    HKDF_SALT,
    IV_SALT_BYTES,
    KEM_SSBYTES,
    LEGACY_MAC_KEY_BYTES,
    XTEA_KEY_BYTES,
)
from orbitkem.kem.kyber import SharedSecret
from orbitkem.session.errors import SessionCryptoError

DERIVED_KEY_BYTES = (
    AES_KEY_BYTES + IV_SALT_BYTES + LEGACY_MAC_KEY_BYTES + XTEA_KEY_BYTES
)


def hkdf_sha256(ikm: bytes, salt: bytes | None, info: bytes, length: int) -> bytes:
    return HKDF(algorithm=hashes.SHA256(), length=length, salt=salt, info=info).derive(
        ikm
    )


@dataclass(frozen=True, repr=False)
class SessionKeys:
    aes_key: bytes
    iv_salt: bytes
    mac_key_legacy: bytes
    xtea_key: bytes

    def __repr__(self) -> str:
        return "SessionKeys(<redacted>)"


def derive_keys(ss: SharedSecret | bytes, context: bytes) -> SessionKeys:
    """Split one HKDF output into disjoint AES, IV-salt, legacy MAC and XTEA ranges."""
    secret = ss.data if isinstance(ss, SharedSecret) else ss
    if len(secret) != KEM_SSBYTES:
        raise SessionCryptoError(f"Shared secret must be {KEM_SSBYTES} bytes.")
    okm = hkdf_sha256(secret, HKDF_SALT, context, DERIVED_KEY_BYTES)
    pos = 0
    parts = []
    for size in (AES_KEY_BYTES, IV_SALT_BYTES, LEGACY_MAC_KEY_BYTES, XTEA_KEY_BYTES):
        parts.append(okm[pos : pos + size])
        pos += size
    return SessionKeys(*parts)
