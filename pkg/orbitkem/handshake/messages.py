"""Handshake messages and their CSP payload encodings.

Fragment messages ride on their own ports with the fragment sub-header as the
payload; the fragment's transfer_id is the session id. Control messages use
kind (1) || session_id (2, big-endian) || body.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from enum import Enum, IntEnum

from orbitkem.constants import CONFIRM_TAG_BYTES
from orbitkem.handshake.errors import HandshakeError
from orbitkem.link.errors import LinkError
from orbitkem.link.fragment import Fragment


class MessageKind(IntEnum):
    PK_FRAGMENT = 1
    CT_FRAGMENT = 2
    FRAGMENT_NACK = 3
    CONFIRM = 4
    CONFIRM_ACK = 5


class TransferObject(str, Enum):
    PK = "pk"
    CT = "ct"


_OBJECT_CODES = {TransferObject.PK: 1, TransferObject.CT: 2}
_CONTROL_HEAD = struct.Struct(">BH")


@dataclass(frozen=True)
class Nack:
    obj: TransferObject
    total: int
    missing: frozenset[int]

    @property
    def send_all(self) -> bool:
        return self.total == 0

    def encode(self) -> bytes:
        bitmap = bytearray(-(-self.total // 8))
        for index in self.missing:
            bitmap[index // 8] |= 1 << (index % 8)
        return struct.pack(">BH", _OBJECT_CODES[self.obj], self.total) + bytes(bitmap)

    @classmethod
    def decode(cls, body: bytes) -> "Nack":
        if len(body) < 3:
            raise HandshakeError("NACK body too short.")
        code, total = struct.unpack_from(">BH", body)
        objects = {v: k for k, v in _OBJECT_CODES.items()}
        if code not in objects:
            raise HandshakeError(f"Unknown NACK object code {code}.")
        bitmap = body[3:]
        if len(bitmap) != -(-total // 8):
            raise HandshakeError("NACK bitmap length does not match total.")
        missing = frozenset(i for i in range(total) if bitmap[i // 8] >> (i % 8) & 1)
        return cls(objects[code], total, missing)


@dataclass(frozen=True)
class HandshakeMessage:
    kind: MessageKind
    session_id: int
    body: bytes

    def encode(self) -> bytes:
        """Canonical bytes, used both as the control payload and for the transcript."""
        return _CONTROL_HEAD.pack(self.kind, self.session_id) + self.body

    @property
    def is_fragment(self) -> bool:
        return self.kind in (MessageKind.PK_FRAGMENT, MessageKind.CT_FRAGMENT)

    def fragment(self) -> Fragment:
        return Fragment.from_bytes(self.body)

    def nack(self) -> Nack:
        return Nack.decode(self.body)

    def payload(self) -> bytes:
        return self.body if self.is_fragment else self.encode()

    @classmethod
    def for_fragment(cls, kind: MessageKind, frag: Fragment) -> "HandshakeMessage":
        return cls(kind, frag.header.transfer_id, frag.to_bytes())

    @classmethod
    def confirm(
        cls, session_id: int, tag: bytes, *, ack: bool = False
    ) -> "HandshakeMessage":
        if len(tag) != CONFIRM_TAG_BYTES:
            raise HandshakeError("Confirm tag must be 16 bytes.")
        kind = MessageKind.CONFIRM_ACK if ack else MessageKind.CONFIRM
        return cls(kind, session_id, tag)


def decode_message(
    payload: bytes, *, port: int, pk_port: int, ct_port: int, control_port: int
) -> HandshakeMessage:
    try:
        if port in (pk_port, ct_port):
            frag = Fragment.from_bytes(payload)
            kind = (
                MessageKind.PK_FRAGMENT if port == pk_port else MessageKind.CT_FRAGMENT
            )
            return HandshakeMessage.for_fragment(kind, frag)
    except LinkError as exc:
        raise HandshakeError(f"Malformed fragment: {exc}") from exc
    if port != control_port:
        raise HandshakeError(f"Port {port} carries no handshake traffic.")
    if len(payload) < _CONTROL_HEAD.size:
        raise HandshakeError("Control message too short.")
    code, session_id = _CONTROL_HEAD.unpack_from(payload)
    try:
        kind = MessageKind(code)
    except ValueError as exc:
        raise HandshakeError(f"Unknown message kind {code}.") from exc
    if kind in (MessageKind.PK_FRAGMENT, MessageKind.CT_FRAGMENT):
        raise HandshakeError("Fragments never travel on the control port.")
    message = HandshakeMessage(kind, session_id, payload[_CONTROL_HEAD.size :])
    if kind is MessageKind.FRAGMENT_NACK:
        message.nack()
    elif len(message.body) != CONFIRM_TAG_BYTES:
        raise HandshakeError("Confirm tag must be 16 bytes.")
    return message
