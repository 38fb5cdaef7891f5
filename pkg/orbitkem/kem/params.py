from __future__ import annotations

from dataclasses import dataclass

from orbitkem.constants import (
    KEM_DU,
    KEM_DV,
    KEM_ETA1,
    KEM_ETA2,
    KEM_K,
    KEM_N,
    KEM_Q,
    KEM_SSBYTES,
    KEM_SYMBYTES,
)
from orbitkem.kem.errors import KemError


@dataclass(frozen=True)
class KemParams:
    """Kyber-512 round-3 parameter set; the only one this package implements."""

    n: int = KEM_N
    q: int = KEM_Q
    k: int = KEM_K
    eta1: int = KEM_ETA1
    eta2: int = KEM_ETA2
    du: int = KEM_DU
    dv: int = KEM_DV

    def __post_init__(self) -> None:
        expected = (KEM_N, KEM_Q, KEM_K, KEM_ETA1, KEM_ETA2, KEM_DU, KEM_DV)
        actual = (self.n, self.q, self.k, self.eta1, self.eta2, self.du, self.dv)
        if actual != expected:
            raise KemError(
                f"Unsupported parameter set {actual}; only Kyber-512 {expected} is implemented."
            )

    @property
    def poly_bytes(self) -> int:
        return 12 * self.n // 8

    @property
    def polyvec_bytes(self) -> int:
        return self.k * self.poly_bytes

    @property
    def public_key_bytes(self) -> int:
        return self.polyvec_bytes + KEM_SYMBYTES

    @property
    def indcpa_secret_key_bytes(self) -> int:
        return self.polyvec_bytes

    @property
    def secret_key_bytes(self) -> int:
        return (
            self.indcpa_secret_key_bytes
            + self.public_key_bytes
            + KEM_SYMBYTES
            + KEM_SYMBYTES
        )

    @property
    def polyvec_compressed_bytes(self) -> int:
        return self.du * self.k * self.n // 8

    @property
    def poly_compressed_bytes(self) -> int:
        return self.dv * self.n // 8

    @property
    def ciphertext_bytes(self) -> int:
        return self.polyvec_compressed_bytes + self.poly_compressed_bytes

    @property
    def shared_secret_bytes(self) -> int:
        return KEM_SSBYTES


KYBER512 = KemParams()
