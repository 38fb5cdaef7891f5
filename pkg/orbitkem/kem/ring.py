"""Arithmetic in R_q = Z_q[X]/(X^256 + 1) for the module-lattice KEM.

Elements carry a domain tag: coefficient form or NTT form. The NTT is the
incomplete negacyclic transform with seven layers, so an NTT-domain element is
128 degree-one residues and products use pairwise base multiplication.
"""

from __future__ import annotations

from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from enum import Enum

from orbitkem.constants import KEM_N, KEM_Q
from orbitkem.kem.errors import DomainMismatch, InsufficientInput, KemError


class Domain(str, Enum):
    COEFF = "coeff"
    NTT = "ntt"


def _bitrev7(value: int) -> int:
    return int(f"{value:07b}"[::-1], 2)


# 17 is a primitive 256th root of unity modulo q.
ZETAS: tuple[int, ...] = tuple(pow(17, _bitrev7(i), KEM_Q) for i in range(128))
GAMMAS: tuple[int, ...] = tuple(
    pow(17, 2 * _bitrev7(i) + 1, KEM_Q) for i in range(128)
)
_INV_128 = pow(128, -1, KEM_Q)


@dataclass(frozen=True)
class RingElement:
    coeffs: tuple[int, ...]
    domain: Domain = Domain.COEFF

    def __post_init__(self) -> None:
        if len(self.coeffs) != KEM_N:
            raise KemError(f"Ring element needs {KEM_N} coefficients.")
        for value in self.coeffs:
            if not 0 <= value < KEM_Q:
                raise KemError("Ring element coefficient is not in canonical form.")

    @classmethod
    def zero(cls, domain: Domain = Domain.COEFF) -> "RingElement":
        return cls((0,) * KEM_N, domain)

    @classmethod
    def from_ints(
        cls, values: Iterable[int], domain: Domain = Domain.COEFF
    ) -> "RingElement":
        return cls(tuple(v % KEM_Q for v in values), domain)

    def _require_same_domain(self, other: "RingElement") -> None:
        if self.domain is not other.domain:
            raise DomainMismatch(
                f"Cannot combine {self.domain.value} and {other.domain.value} elements."
            )

    def __add__(self, other: "RingElement") -> "RingElement":
        self._require_same_domain(other)
        return RingElement(
            tuple((a + b) % KEM_Q for a, b in zip(self.coeffs, other.coeffs)),
            self.domain,
        )

    def __sub__(self, other: "RingElement") -> "RingElement":
        self._require_same_domain(other)
        return RingElement(
            tuple((a - b) % KEM_Q for a, b in zip(self.coeffs, other.coeffs)),
            self.domain,
        )

    def multiply(self, other: "RingElement") -> "RingElement":
        """Product of two NTT-domain elements (pairwise base multiplication)."""
        self._require_same_domain(other)
        if self.domain is not Domain.NTT:
            raise DomainMismatch("Base multiplication needs NTT-domain operands.")
        return RingElement(
            tuple(_basemul(self.coeffs, other.coeffs)), Domain.NTT
        )


def _basemul(a: Sequence[int], b: Sequence[int]) -> list[int]:
    out = [0] * KEM_N
    for i in range(128):
        a0, a1 = a[2 * i], a[2 * i + 1]
        b0, b1 = b[2 * i], b[2 * i + 1]
        out[2 * i] = (a0 * b0 + a1 * b1 * GAMMAS[i]) % KEM_Q
        out[2 * i + 1] = (a0 * b1 + a1 * b0) % KEM_Q
    return out


def ntt_forward(p: RingElement) -> RingElement:
    if p.domain is not Domain.COEFF:
        raise DomainMismatch("ntt_forward expects a coefficient-domain element.")
    f = list(p.coeffs)
    k = 1
    length = 128
    while length >= 2:
        for start in range(0, KEM_N, 2 * length):
            zeta = ZETAS[k]
            k += 1
            for j in range(start, start + length):
                t = zeta * f[j + length] % KEM_Q
                f[j + length] = (f[j] - t) % KEM_Q
                f[j] = (f[j] + t) % KEM_Q
        length >>= 1
    return RingElement(tuple(f), Domain.NTT)


def ntt_inverse(p: RingElement) -> RingElement:
    if p.domain is not Domain.NTT:
        raise DomainMismatch("ntt_inverse expects an NTT-domain element.")
    f = list(p.coeffs)
    k = 127
    length = 2
    while length <= 128:
        for start in range(0, KEM_N, 2 * length):
            zeta = ZETAS[k]
            k -= 1
            for j in range(start, start + length):
                t = f[j]
                f[j] = (t + f[j + length]) % KEM_Q
                f[j + length] = zeta * (f[j + length] - t) % KEM_Q
        length <<= 1
    return RingElement(tuple(v * _INV_128 % KEM_Q for v in f), Domain.COEFF)


@dataclass(frozen=True)
class RingVector:
    elems: tuple[RingElement, ...]

    def __post_init__(self) -> None:
        if not self.elems:
            raise KemError("Ring vector needs at least one element.")
        first = self.elems[0].domain
        if any(e.domain is not first for e in self.elems):
            raise DomainMismatch("Ring vector elements must share one domain.")

    @property
    def domain(self) -> Domain:
        return self.elems[0].domain

    def __len__(self) -> int:
        return len(self.elems)

    def __add__(self, other: "RingVector") -> "RingVector":
        if len(other) != len(self):
            raise KemError("Ring vector rank mismatch.")
        return RingVector(tuple(a + b for a, b in zip(self.elems, other.elems)))

    def ntt(self) -> "RingVector":
        return RingVector(tuple(ntt_forward(e) for e in self.elems))

    def ntt_inverse(self) -> "RingVector":
        return RingVector(tuple(ntt_inverse(e) for e in self.elems))

    def dot(self, other: "RingVector") -> RingElement:
        """Inner product of two NTT-domain vectors."""
        if len(other) != len(self):
            raise KemError("Ring vector rank mismatch.")
        acc = [0] * KEM_N
        for a, b in zip(self.elems, other.elems):
            if a.domain is not Domain.NTT or b.domain is not Domain.NTT:
                raise DomainMismatch("Inner product needs NTT-domain operands.")
            for i, value in enumerate(_basemul(a.coeffs, b.coeffs)):
                acc[i] += value
        return RingElement(tuple(v % KEM_Q for v in acc), Domain.NTT)


def cbd_sample(buf: bytes, eta: int) -> RingElement:
    """Centered binomial sample: per coefficient, eta bits minus the next eta bits."""
    if eta not in (2, 3):
        raise KemError(f"Unsupported noise width eta={eta}.")
    needed = 64 * eta
    if len(buf) < needed:
        raise InsufficientInput(f"CBD with eta={eta} needs {needed} bytes.")
    bits = int.from_bytes(buf[:needed], "little")
    mask = (1 << eta) - 1
    coeffs = []
    for i in range(KEM_N):
        chunk = bits >> (2 * eta * i)
        a = (chunk & mask).bit_count()
        b = ((chunk >> eta) & mask).bit_count()
        coeffs.append((a - b) % KEM_Q)
    return RingElement(tuple(coeffs), Domain.COEFF)


def compress(x: int, d: int) -> int:
    # round-half-up of 2^d * x / q; (q - 1) / 2 = 1664 makes the integer form exact
    return (((x << d) + KEM_Q // 2) // KEM_Q) & ((1 << d) - 1)


def decompress(y: int, d: int) -> int:
    return (y * KEM_Q + (1 << (d - 1))) >> d


def compress_element(p: RingElement, d: int) -> list[int]:
    return [compress(c, d) for c in p.coeffs]


def decompress_element(values: Sequence[int], d: int) -> RingElement:
    return RingElement(tuple(decompress(v, d) for v in values), Domain.COEFF)


def byte_encode(values: Sequence[int], bits: int) -> bytes:
    """Pack 256 integers of `bits` bits each, little-endian bit order."""
    if len(values) != KEM_N:
        raise KemError(f"byte_encode needs {KEM_N} values.")
    acc = 0
    for value in reversed(values):
        acc = (acc << bits) | value
    return acc.to_bytes(32 * bits, "little")


def byte_decode(data: bytes, bits: int) -> list[int]:
    if len(data) != 32 * bits:
        raise InsufficientInput(f"byte_decode needs {32 * bits} bytes for d={bits}.")
    acc = int.from_bytes(data, "little")
    mask = (1 << bits) - 1
    return [(acc >> (bits * i)) & mask for i in range(KEM_N)]


def encode_element(p: RingElement) -> bytes:
    return byte_encode(p.coeffs, 12)


def decode_element(
    data: bytes, domain: Domain = Domain.NTT, *, strict: bool = True
) -> RingElement:
    values = byte_decode(data, 12)
    if strict:
        if any(v >= KEM_Q for v in values):
            raise KemError("Non-canonical 12-bit coefficient encoding.")
        return RingElement(tuple(values), domain)
    return RingElement.from_ints(values, domain)


def encode_ring_vector(v: RingVector) -> bytes:
    return b"".join(encode_element(e) for e in v.elems)


def decode_ring_vector(
    data: bytes, rank: int, domain: Domain = Domain.NTT, *, strict: bool = True
) -> RingVector:
    if len(data) != 384 * rank:
        raise InsufficientInput(f"Ring vector of rank {rank} needs {384 * rank} bytes.")
    return RingVector(
        tuple(
            decode_element(data[384 * i : 384 * (i + 1)], domain, strict=strict)
            for i in range(rank)
        )
    )


def message_to_element(message: bytes) -> RingElement:
    bits = byte_decode(message, 1)
    return decompress_element(bits, 1)


def element_to_message(p: RingElement) -> bytes:
    return byte_encode(compress_element(p, 1), 1)
