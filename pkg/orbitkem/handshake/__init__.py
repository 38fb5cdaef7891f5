from orbitkem.handshake.accounting import AccountingReport, bytes_over_air
from orbitkem.handshake.config import HandshakeConfig, Role
from orbitkem.handshake.errors import HandshakeError
from orbitkem.handshake.messages import (
    HandshakeMessage,
    MessageKind,
    Nack,
    TransferObject,
    decode_message,
)
from orbitkem.handshake.session import (
    Event,
    FailureReason,
    HandshakeSession,
    HandshakeState,
    Incoming,
    Outbound,
    PassClosed,
    PassOpened,
    Tick,
    confirm_tag,
    direction_label,
    new_session,
    step,
)
from orbitkem.handshake.snapshot import SnapshotError, restore_session, snapshot_session

__all__ = [
    "AccountingReport",
    "Event",
    "FailureReason",
    "HandshakeConfig",
    "HandshakeError",
    "HandshakeMessage",
    "HandshakeSession",
    "HandshakeState",
    "Incoming",
    "MessageKind",
    "Nack",
    "Outbound",
    "PassClosed",
    "PassOpened",
    "Role",
    "SnapshotError",
    "Tick",
    "TransferObject",
    "bytes_over_air",
    "confirm_tag",
    "decode_message",
    "direction_label",
    "new_session",
    "restore_session",
    "snapshot_session",
    "step",
]
