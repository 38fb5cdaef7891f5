"""SHA-3 family instantiation of the KEM's hash, PRF, XOF and KDF."""

from __future__ import annotations

import hashlib

from orbitkem.constants import KEM_N, KEM_Q, KEM_SSBYTES, KEM_SYMBYTES
from orbitkem.kem.ring import Domain, RingElement

SHAKE128_RATE = 168
_XOF_INITIAL_BLOCKS = 3


def hash_h(data: bytes) -> bytes:
    return hashlib.sha3_256(data).digest()


def hash_g(data: bytes) -> tuple[bytes, bytes]:
    digest = hashlib.sha3_512(data).digest()
    return digest[:KEM_SYMBYTES], digest[KEM_SYMBYTES:]


def prf(seed: bytes, nonce: int, length: int) -> bytes:
    return hashlib.shake_256(seed + bytes([nonce])).digest(length)


def kdf(data: bytes) -> bytes:
    return hashlib.shake_256(data).digest(KEM_SSBYTES)


def sample_ntt(rho: bytes, x: int, y: int) -> RingElement:
    """Rejection-sample a uniform NTT-domain element from SHAKE-128(rho || x || y).

    Every 3 bytes yield two 12-bit candidates; candidates >= q are dropped.
    """
    xof = hashlib.shake_128(rho + bytes([x, y]))
    available = SHAKE128_RATE * _XOF_INITIAL_BLOCKS
    stream = xof.digest(available)
    coeffs: list[int] = []
    pos = 0
    while len(coeffs) < KEM_N:
        if pos + 3 > available:
            available += SHAKE128_RATE
            stream = xof.digest(available)
        b0, b1, b2 = stream[pos], stream[pos + 1], stream[pos + 2]
        pos += 3
        d1 = b0 | ((b1 & 0x0F) << 8)
        d2 = (b1 >> 4) | (b2 << 4)
        if d1 < KEM_Q:
            coeffs.append(d1)
        if d2 < KEM_Q and len(coeffs) < KEM_N:
            coeffs.append(d2)
    return RingElement(tuple(coeffs), Domain.NTT)
