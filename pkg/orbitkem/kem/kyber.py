"""Kyber-512 IND-CCA2 KEM: keygen, encapsulation and decapsulation.

Every operation is a pure function of its inputs. Randomness is always passed
in as a seed, so known-answer tests and simulations are reproducible.
"""

from __future__ import annotations

import hmac
import logging
from dataclasses import dataclass

from orbitkem.constants import (
    KEM_ENCAPS_SEED_BYTES,
    KEM_KEYGEN_SEED_BYTES,
    KEM_SYMBYTES,
)
from orbitkem.kem.errors import (
    KemError,
    MalformedCiphertext,
    MalformedKey,
    RandomnessError,
)
from orbitkem.kem.indcpa import indcpa_decrypt, indcpa_encrypt, indcpa_keypair
from orbitkem.kem.params import KYBER512, KemParams
from orbitkem.kem.ring import decode_ring_vector
from orbitkem.kem.symmetric import hash_g, hash_h, kdf

logger = logging.getLogger(__name__)


@dataclass(frozen=True, repr=False)
class KemKeyPair:
    public_key: bytes
    secret_key: bytes

    def __post_init__(self) -> None:
        if len(self.public_key) != KYBER512.public_key_bytes:
            raise MalformedKey("Public key must be 800 bytes.")
        if len(self.secret_key) != KYBER512.secret_key_bytes:
            raise MalformedKey("Secret key must be 1632 bytes.")

    def __repr__(self) -> str:
        return f"KemKeyPair(public_key={self.public_key[:8].hex()}..., secret_key=<redacted>)"


@dataclass(frozen=True)
class KemCiphertext:
    data: bytes

    def __post_init__(self) -> None:
        if len(self.data) != KYBER512.ciphertext_bytes:
            raise MalformedCiphertext("Ciphertext must be 768 bytes.")


@dataclass(frozen=True, repr=False)
class SharedSecret:
    data: bytes

    def __post_init__(self) -> None:
        if len(self.data) != KYBER512.shared_secret_bytes:
            raise KemError("Shared secret must be 32 bytes.")

    def __repr__(self) -> str:
        return "SharedSecret(<redacted>)"

    __str__ = __repr__


def public_key_of(secret_key: bytes, params: KemParams = KYBER512) -> bytes:
    start = params.indcpa_secret_key_bytes
    return secret_key[start : start + params.public_key_bytes]


def validate_public_key(public_key: bytes, params: KemParams = KYBER512) -> None:
    if len(public_key) != params.public_key_bytes:
        raise MalformedKey(
            f"Public key must be {params.public_key_bytes} bytes, got {len(public_key)}."
        )
    try:
        decode_ring_vector(public_key[: params.polyvec_bytes], params.k, strict=True)
    except KemError as exc:
        raise MalformedKey(str(exc)) from exc


def kem_keygen(seed: bytes, params: KemParams = KYBER512) -> KemKeyPair:
    """Deterministic keypair from 64 seed bytes: d (32) for the CPA key, z (32)."""
    if len(seed) != KEM_KEYGEN_SEED_BYTES:
        raise RandomnessError(f"Keygen needs {KEM_KEYGEN_SEED_BYTES} seed bytes.")
    d, z = seed[:KEM_SYMBYTES], seed[KEM_SYMBYTES:]
    public_key, cpa_secret = indcpa_keypair(d, params)
    secret_key = cpa_secret + public_key + hash_h(public_key) + z
    return KemKeyPair(public_key=public_key, secret_key=secret_key)


def kem_encaps(
    public_key: bytes, seed: bytes, params: KemParams = KYBER512
) -> tuple[KemCiphertext, SharedSecret]:
    if len(seed) != KEM_ENCAPS_SEED_BYTES:
        raise RandomnessError(
            f"Encapsulation needs {KEM_ENCAPS_SEED_BYTES} seed bytes."
        )
    validate_public_key(public_key, params)
    message = hash_h(seed)
    pre_key, coins = hash_g(message + hash_h(public_key))
    ciphertext = indcpa_encrypt(public_key, message, coins, params)
    shared = kdf(pre_key + hash_h(ciphertext))
    return KemCiphertext(ciphertext), SharedSecret(shared)


def _select(fail: int, honest: bytes, fallback: bytes) -> bytes:
    mask = -fail & 0xFF
    return bytes(a ^ (mask & (a ^ b)) for a, b in zip(honest, fallback))


def kem_decaps(
    secret_key: bytes, ciphertext: bytes | KemCiphertext, params: KemParams = KYBER512
) -> SharedSecret:
    """Decapsulate with implicit rejection: a bad ciphertext yields KDF(z || H(c))."""
    ct = ciphertext.data if isinstance(ciphertext, KemCiphertext) else ciphertext
    if len(secret_key) != params.secret_key_bytes:
        raise MalformedKey(f"Secret key must be {params.secret_key_bytes} bytes.")
    if len(ct) != params.ciphertext_bytes:
        raise MalformedCiphertext(
            f"Ciphertext must be {params.ciphertext_bytes} bytes."
        )

    cpa_secret = secret_key[: params.indcpa_secret_key_bytes]
    public_key = public_key_of(secret_key, params)
    pk_hash_start = params.indcpa_secret_key_bytes + params.public_key_bytes
    pk_hash = secret_key[pk_hash_start : pk_hash_start + KEM_SYMBYTES]
    z = secret_key[pk_hash_start + KEM_SYMBYTES :]

    message = indcpa_decrypt(cpa_secret, ct, params)
    pre_key, coins = hash_g(message + pk_hash)
    reencrypted = indcpa_encrypt(public_key, message, coins, params)
    fail = int(not hmac.compare_digest(reencrypted, ct))
    chosen = _select(fail, pre_key, z)
    return SharedSecret(kdf(chosen + hash_h(ct)))
