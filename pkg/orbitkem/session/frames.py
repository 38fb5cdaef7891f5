"""AES-256-GCM secure frames with per-direction sequence numbers.

Frame wire layout: sequence (8, big-endian) || ciphertext || tag (16).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

from cryptography.exceptions import InvalidTag
from cryptography.hazmat.primitives.ciphers.aead import AESGCM

from orbitkem.constants import (
    AES_KEY_BYTES,
    FRAME_SEQUENCE_BYTES,
    GCM_TAG_BYTES,
    IV_SALT_BYTES,
    REPLAY_WINDOW,
)
from orbitkem.session.errors import (
    AuthFail,
    NonceReuse,
    ReplayRejected,
    SessionCryptoError,
)
from orbitkem.session.keys import SessionKeys

logger = logging.getLogger(__name__)

_MAX_SEQUENCE = (1 << 64) - 1


@dataclass(frozen=True)
class SecureFrame:
    sequence: int
    ciphertext: bytes
    auth_tag: bytes

    def to_bytes(self) -> bytes:
        return (
            self.sequence.to_bytes(FRAME_SEQUENCE_BYTES, "big")
            + self.ciphertext
            + self.auth_tag
        )

    @classmethod
    def from_bytes(cls, data: bytes) -> "SecureFrame":
        if len(data) < FRAME_SEQUENCE_BYTES + GCM_TAG_BYTES:
            raise AuthFail("Secure frame too short.")
        return cls(
            sequence=int.from_bytes(data[:FRAME_SEQUENCE_BYTES], "big"),
            ciphertext=data[FRAME_SEQUENCE_BYTES:-GCM_TAG_BYTES],
            auth_tag=data[-GCM_TAG_BYTES:],
        )


def frame_nonce(iv_salt: bytes, sequence: int) -> bytes:
    if len(iv_salt) != IV_SALT_BYTES:
        raise SessionCryptoError("IV salt must be 12 bytes.")
    if not 0 <= sequence <= _MAX_SEQUENCE:
        raise SessionCryptoError("Sequence number must fit 64 bits.")
    counter = sequence.to_bytes(IV_SALT_BYTES, "big")
    return bytes(a ^ b for a, b in zip(iv_salt, counter))


def aes_gcm_seal(key: bytes, nonce: bytes, plaintext: bytes, aad: bytes = b"") -> bytes:
    """Ciphertext followed by the 16-byte tag."""
    if len(key) != AES_KEY_BYTES:
        raise SessionCryptoError("AES-256 needs a 32-byte key.")
    return AESGCM(key).encrypt(nonce, plaintext, aad or None)


def aes_gcm_open(key: bytes, nonce: bytes, sealed: bytes, aad: bytes = b"") -> bytes:
    if len(key) != AES_KEY_BYTES:
        raise SessionCryptoError("AES-256 needs a 32-byte key.")
    try:
        return AESGCM(key).decrypt(nonce, sealed, aad or None)
    except InvalidTag as exc:
        raise AuthFail("GCM authentication failed.") from exc


def encrypt_frame(
    keys: SessionKeys, sequence: int, plaintext: bytes, aad: bytes = b""
) -> SecureFrame:
    nonce = frame_nonce(keys.iv_salt, sequence)
    sealed = aes_gcm_seal(keys.aes_key, nonce, plaintext, aad)
    return SecureFrame(sequence, sealed[:-GCM_TAG_BYTES], sealed[-GCM_TAG_BYTES:])


def decrypt_frame(keys: SessionKeys, frame: SecureFrame, aad: bytes = b"") -> bytes:
    return aes_gcm_open(
        keys.aes_key,
        frame_nonce(keys.iv_salt, frame.sequence),
        frame.ciphertext + frame.auth_tag,
        aad,
    )


@dataclass
class ReplayWindow:
    """Sliding window over the highest accepted sequence; bit i marks highest - i."""

    size: int = REPLAY_WINDOW
    highest: int = -1
    bitmap: int = 0

    def check(self, sequence: int) -> None:
        if self.highest < 0 or sequence > self.highest:
            return
        offset = self.highest - sequence
        if offset >= self.size:
            raise ReplayRejected(f"Sequence {sequence} is older than the window.")
        if self.bitmap >> offset & 1:
            raise ReplayRejected(f"Sequence {sequence} was already accepted.")

    def accept(self, sequence: int) -> None:
        self.check(sequence)
        if sequence > self.highest:
            shift = sequence - self.highest if self.highest >= 0 else self.size
            self.bitmap = ((self.bitmap << shift) | 1) & ((1 << self.size) - 1)
            self.highest = sequence
        else:
            self.bitmap |= 1 << (self.highest - sequence)


@dataclass
class FrameSealer:
    keys: SessionKeys
    last_sequence: int = -1
    nonces: list[bytes] = field(default_factory=list)

    def seal(
        self, plaintext: bytes, aad: bytes = b"", sequence: int | None = None
    ) -> SecureFrame:
        sequence = self.last_sequence + 1 if sequence is None else sequence
        if sequence <= self.last_sequence:
            raise NonceReuse(
                f"Sequence {sequence} not above last used {self.last_sequence}."
            )
        frame = encrypt_frame(self.keys, sequence, plaintext, aad)
        self.last_sequence = sequence
        self.nonces.append(frame_nonce(self.keys.iv_salt, sequence))
        return frame


@dataclass
class FrameOpener:
    keys: SessionKeys
    window: ReplayWindow = field(default_factory=ReplayWindow)

    def open(self, frame: SecureFrame | bytes, aad: bytes = b"") -> bytes:
        if isinstance(frame, bytes):
            frame = SecureFrame.from_bytes(frame)
        self.window.check(frame.sequence)
        plaintext = decrypt_frame(self.keys, frame, aad)
        self.window.accept(frame.sequence)
        return plaintext
