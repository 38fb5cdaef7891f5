"""Splitting large objects into MTU-sized chunks and putting them back together.

Each chunk travels behind an 8-byte sub-header: transfer_id, index, total and
chunk_len, all big-endian u16.
"""

from __future__ import annotations

import logging
import struct
from collections.abc import Iterable
from dataclasses import dataclass, field

from orbitkem.constants import FRAGMENT_HEADER_BYTES, FRAGMENT_MAX_TOTAL
from orbitkem.link.errors import EmptyPayload, IntegrityConflict, LinkError, Truncated

logger = logging.getLogger(__name__)

_FRAGMENT_STRUCT = struct.Struct(">HHHH")


@dataclass(frozen=True)
class FragmentHeader:
    transfer_id: int
    index: int
    total: int
    chunk_len: int

    def __post_init__(self) -> None:
        for name in ("transfer_id", "index", "total", "chunk_len"):
            value = getattr(self, name)
            if not 0 <= value <= 0xFFFF:
                raise LinkError(f"Fragment field {name}={value} does not fit 16 bits.")
        if self.total == 0 or self.index >= self.total:
            raise LinkError(f"Fragment index {self.index} outside total {self.total}.")
        if self.chunk_len == 0:
            raise LinkError("Fragment chunk_len must be positive.")

    def pack(self) -> bytes:
        return _FRAGMENT_STRUCT.pack(
            self.transfer_id, self.index, self.total, self.chunk_len
        )


@dataclass(frozen=True)
class Fragment:
    header: FragmentHeader
    chunk: bytes

    def to_bytes(self) -> bytes:
        return self.header.pack() + self.chunk

    @classmethod
    def from_bytes(cls, data: bytes) -> "Fragment":
        if len(data) < FRAGMENT_HEADER_BYTES:
            raise Truncated("Fragment shorter than its 8-byte sub-header.")
        header = FragmentHeader(*_FRAGMENT_STRUCT.unpack_from(data))
        chunk = data[FRAGMENT_HEADER_BYTES:]
        if len(chunk) != header.chunk_len:
            raise Truncated(
                f"Fragment declares {header.chunk_len} bytes but carries {len(chunk)}."
            )
        return cls(header, chunk)


@dataclass(frozen=True)
class Incomplete:
    missing: frozenset[int]
    total: int


def fragment(payload: bytes, mtu_payload: int, transfer_id: int = 0) -> list[Fragment]:
    if not payload:
        raise EmptyPayload("Cannot fragment an empty payload.")
    if mtu_payload < 1:
        raise LinkError("Fragment chunk size must be at least one byte.")
    total = -(-len(payload) // mtu_payload)
    if total > FRAGMENT_MAX_TOTAL:
        raise LinkError(
            f"Payload needs {total} fragments; the limit is {FRAGMENT_MAX_TOTAL}."
        )
    out = []
    for index in range(total):
        chunk = payload[index * mtu_payload : (index + 1) * mtu_payload]
        header = FragmentHeader(transfer_id, index, total, len(chunk))
        out.append(Fragment(header, chunk))
    return out


@dataclass
class Reassembler:
    """Per-transfer reassembly buffer; duplicates are idempotent."""

    transfer_id: int | None = None
    total: int | None = None
    chunks: dict[int, bytes] = field(default_factory=dict)

    def add(self, frag: Fragment) -> bool:
        """Store a fragment; True when it was new."""
        head = frag.header
        if self.transfer_id is None:
            self.transfer_id = head.transfer_id
            self.total = head.total
        elif head.transfer_id != self.transfer_id:
            raise IntegrityConflict(
                f"Fragment of transfer {head.transfer_id} mixed into {self.transfer_id}."
            )
        elif head.total != self.total:
            raise IntegrityConflict(
                f"Fragment total {head.total} disagrees with {self.total}."
            )
        existing = self.chunks.get(head.index)
        if existing is not None:
            if existing != frag.chunk:
                raise IntegrityConflict(
                    f"Duplicate fragment {head.index} carries different bytes."
                )
            return False
        self.chunks[head.index] = frag.chunk
        return True

    @property
    def missing(self) -> frozenset[int]:
        if self.total is None:
            return frozenset()
        return frozenset(set(range(self.total)) - self.chunks.keys())

    @property
    def complete(self) -> bool:
        return self.total is not None and not self.missing

    def result(self) -> bytes | Incomplete:
        if self.total is None:
            return Incomplete(frozenset(), 0)
        if self.missing:
            return Incomplete(self.missing, self.total)
        return b"".join(self.chunks[i] for i in range(self.total))


def reassemble(frags: Iterable[Fragment]) -> bytes | Incomplete:
    buffer = Reassembler()
    for frag in frags:
        buffer.add(frag)
    return buffer.result()
