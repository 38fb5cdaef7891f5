"""Pure transition function for one party of the KEM handshake.

`step(session, event)` never mutates its input and never performs I/O: it
returns a new session plus the packets to put on the air. Randomness enters
only through the seeds fixed at `new_session`.
"""

from __future__ import annotations

import copy
import hashlib
import hmac
import logging
from dataclasses import dataclass, field
from enum import Enum

from cryptography.hazmat.primitives import hashes
from cryptography.hazmat.primitives import hmac as crypto_hmac

from orbitkem.constants import (
    CONFIRM_LABEL_GS_TO_SAT,
    CONFIRM_LABEL_SAT_TO_GS,
    CONFIRM_TAG_BYTES,
    KEM_ENCAPS_SEED_BYTES,
    KEM_KEYGEN_SEED_BYTES,
    KEM_SSBYTES,
)
from orbitkem.handshake.config import HandshakeConfig, Role
from orbitkem.handshake.errors import HandshakeError
from orbitkem.handshake.messages import (
    HandshakeMessage,
    MessageKind,
    Nack,
    TransferObject,
    decode_message,
)
from orbitkem.kem.errors import KemError
from orbitkem.kem.kyber import SharedSecret, kem_decaps, kem_encaps, kem_keygen
from orbitkem.link.csp import CspHeader, LinkStats, seal, unpack_header, verify
from orbitkem.link.errors import BadHmac, IntegrityConflict, LinkError
from orbitkem.link.fragment import Fragment, FragmentHeader, Reassembler, fragment

logger = logging.getLogger(__name__)

TRANSCRIPT_INIT = bytes(32)


class HandshakeState(str, Enum):
    IDLE = "Idle"
    TRANSFERRING_PK = "TransferringPk"
    AWAITING_CT = "AwaitingCt"
    TRANSFERRING_CT = "TransferringCt"
    CONFIRMING = "Confirming"
    ESTABLISHED = "Established"
    FAILED = "Failed"


class FailureReason(str, Enum):
    MAX_RETRIES_EXCEEDED = "MaxRetriesExceeded"
    HMAC_REJECTED = "HmacRejected"
    CONFIRM_MISMATCH = "ConfirmMismatch"
    TIMEOUT = "Timeout"
    MALFORMED_PEER_KEY = "MalformedPeerKey"


ALLOWED_TRANSITIONS: dict[HandshakeState, frozenset[HandshakeState]] = {
    HandshakeState.IDLE: frozenset({HandshakeState.TRANSFERRING_PK}),
    HandshakeState.TRANSFERRING_PK: frozenset(
        {HandshakeState.AWAITING_CT, HandshakeState.TRANSFERRING_CT}
    ),
    HandshakeState.AWAITING_CT: frozenset({HandshakeState.CONFIRMING}),
    HandshakeState.TRANSFERRING_CT: frozenset({HandshakeState.CONFIRMING}),
    HandshakeState.CONFIRMING: frozenset({HandshakeState.ESTABLISHED}),
    HandshakeState.ESTABLISHED: frozenset(),
    HandshakeState.FAILED: frozenset(),
}


@dataclass(frozen=True)
class PassOpened:
    now_us: int
    pass_index: int = 0


@dataclass(frozen=True)
class PassClosed:
    now_us: int


@dataclass(frozen=True)
class Tick:
    now_us: int


@dataclass(frozen=True)
class Incoming:
    now_us: int
    packet: bytes


Event = PassOpened | PassClosed | Tick | Incoming


@dataclass(frozen=True)
class Outbound:
    message: HandshakeMessage
    wire: bytes
    port: int
    retransmit: bool = False


@dataclass
class HandshakeSession:
    config: HandshakeConfig
    keygen_seed: bytes = b""
    encaps_seed: bytes = b""
    state: HandshakeState = HandshakeState.IDLE
    failure: FailureReason | None = None
    public_key: bytes | None = None
    secret_key: bytes | None = None
    ciphertext: bytes | None = None
    pk_rx: Reassembler = field(default_factory=Reassembler)
    ct_rx: Reassembler = field(default_factory=Reassembler)
    shared_secret: bytes | None = None
    pending_secret: bytes | None = None
    transcript_hash: bytes = TRANSCRIPT_INIT
    confirm_sent: bytes | None = None
    retries: dict[str, int] = field(default_factory=dict)
    in_pass: bool = False
    started_us: int | None = None
    last_progress_us: int = 0
    last_request_us: int = 0
    hmac_rejects: int = 0
    kem_operations: int = 0
    passes_seen: int = 0
    stats: LinkStats = field(default_factory=LinkStats)

    @property
    def session_id(self) -> int:
        return self.config.session_id

    @property
    def role(self) -> Role:
        assert self.config.role is not None
        return self.config.role

    @property
    def is_terminal(self) -> bool:
        return self.state in (HandshakeState.ESTABLISHED, HandshakeState.FAILED)

    def secret(self) -> SharedSecret | None:
        return SharedSecret(self.shared_secret) if self.shared_secret else None

    def __repr__(self) -> str:
        return (
            f"HandshakeSession(id={self.session_id}, party={self.config.party}, "
            f"role={self.role.value}, state={self.state.value}, failure={self.failure})"
        )


def new_session(
    config: HandshakeConfig, *, keygen_seed: bytes = b"", encaps_seed: bytes = b""
) -> HandshakeSession:
    role = config.role
    if role is Role.KEY_HOLDER and len(keygen_seed) != KEM_KEYGEN_SEED_BYTES:
        raise HandshakeError("A key holder needs a 64-byte keygen seed.")
    if role is Role.ENCAPSULATOR and len(encaps_seed) != KEM_ENCAPS_SEED_BYTES:
        raise HandshakeError("An encapsulator needs a 32-byte encapsulation seed.")
    return HandshakeSession(
        config=config, keygen_seed=keygen_seed, encaps_seed=encaps_seed
    )


def direction_label(party: str) -> bytes:
    return CONFIRM_LABEL_GS_TO_SAT if party == "ground" else CONFIRM_LABEL_SAT_TO_GS


def confirm_tag(
    ss: SharedSecret | bytes | None, transcript_hash: bytes, direction: bytes
) -> bytes:
    secret = ss.data if isinstance(ss, SharedSecret) else ss
    if not secret or len(secret) != KEM_SSBYTES:
        raise HandshakeError("Key confirmation needs the 32-byte shared secret.")
    mac = crypto_hmac.HMAC(secret, hashes.SHA256())
    mac.update(direction + transcript_hash)
    return mac.finalize()[:CONFIRM_TAG_BYTES]


def extend_transcript(transcript: bytes, message: HandshakeMessage) -> bytes:
    return hashlib.sha3_256(transcript + message.encode()).digest()


class _Stepper:
    """Mutable working copy of one transition; discarded after `step` returns."""

    def __init__(self, session: HandshakeSession) -> None:
        self.s = session
        self.cfg = session.config
        self.out: list[Outbound] = []

    # transitions

    def move(self, target: HandshakeState) -> None:
        if target not in ALLOWED_TRANSITIONS[self.s.state]:
            raise HandshakeError(
                f"Illegal transition {self.s.state.value} -> {target.value}."
            )
        logger.debug(
            "Session %d (%s): %s -> %s",
            self.s.session_id,
            self.cfg.party,
            self.s.state.value,
            target.value,
        )
        self.s.state = target

    def fail(self, reason: FailureReason) -> None:
        logger.info(
            "Session %d (%s) failed in %s: %s",
            self.s.session_id,
            self.cfg.party,
            self.s.state.value,
            reason.value,
        )
        self.s.state = HandshakeState.FAILED
        self.s.failure = reason

    # output

    def send(self, message: HandshakeMessage, *, retransmit: bool = False) -> None:
        if message.kind is MessageKind.PK_FRAGMENT:
            port = self.cfg.pk_port
        elif message.kind is MessageKind.CT_FRAGMENT:
            port = self.cfg.ct_port
        else:
            port = self.cfg.control_port
        header = CspHeader(
            priority=self.cfg.priority,
            source=self.cfg.local_address or 0,
            destination=self.cfg.peer_address or 0,
            destination_port=port,
            source_port=self.cfg.source_port,
        )
        packet = seal(
            header,
            message.payload(),
            crc_on=self.cfg.crc_on,
            hmac_key=self.cfg.hmac_key,
            mtu=self.cfg.mtu,
            hmac_alg=self.cfg.hmac_alg,
            hmac_scope=self.cfg.hmac_scope,
            stats=self.s.stats,
        )
        self.out.append(Outbound(message, packet.to_bytes(), port, retransmit))

    def _object(self, obj: TransferObject) -> tuple[bytes | None, MessageKind]:
        if obj is TransferObject.PK:
            return self.s.public_key, MessageKind.PK_FRAGMENT
        return self.s.ciphertext, MessageKind.CT_FRAGMENT

    def fragments_of(self, obj: TransferObject) -> list[HandshakeMessage]:
        data, kind = self._object(obj)
        if data is None:
            return []
        return [
            HandshakeMessage.for_fragment(kind, frag)
            for frag in fragment(data, self.cfg.chunk_size, self.s.session_id)
        ]

    def publish(self, obj: TransferObject) -> None:
        """First transmission of a locally created object; extends the transcript."""
        for message in self.fragments_of(obj):
            self.s.transcript_hash = extend_transcript(self.s.transcript_hash, message)
            self.send(message)

    def absorb(self, buffer: Reassembler, kind: MessageKind) -> bytes:
        """Transcript over a completed incoming object, in index order."""
        assert buffer.total is not None and buffer.transfer_id is not None
        for index in range(buffer.total):
            chunk = buffer.chunks[index]
            header = FragmentHeader(buffer.transfer_id, index, buffer.total, len(chunk))
            frag = Fragment(header, chunk)
            message = HandshakeMessage.for_fragment(kind, frag)
            self.s.transcript_hash = extend_transcript(self.s.transcript_hash, message)
        return b"".join(buffer.chunks[i] for i in range(buffer.total))

    def nack(self, obj: TransferObject, buffer: Reassembler) -> None:
        if buffer.total is None:
            request = Nack(obj, 0, frozenset())
        else:
            request = Nack(obj, buffer.total, buffer.missing)
        if request.total and not request.missing:
            return
        logger.debug(
            "Session %d (%s) requests %s: %s",
            self.s.session_id,
            self.cfg.party,
            obj.value,
            "all" if request.send_all else sorted(request.missing),
        )
        self.send(
            HandshakeMessage(
                MessageKind.FRAGMENT_NACK, self.s.session_id, request.encode()
            )
        )

    def bump_retry(self, key: str) -> bool:
        count = self.s.retries.get(key, 0) + 1
        self.s.retries[key] = count
        if count > self.cfg.max_retries:
            self.fail(FailureReason.MAX_RETRIES_EXCEEDED)
            return False
        return True

    def send_confirm(self, *, retransmit: bool) -> None:
        assert self.s.confirm_sent is not None
        self.send(
            HandshakeMessage.confirm(self.s.session_id, self.s.confirm_sent),
            retransmit=retransmit,
        )

    def send_confirm_ack(self, *, retransmit: bool = False) -> None:
        tag = confirm_tag(
            self.s.shared_secret,
            self.s.transcript_hash,
            direction_label(self.cfg.party),
        )
        self.send(
            HandshakeMessage.confirm(self.s.session_id, tag, ack=True),
            retransmit=retransmit,
        )

    def peer_tag_ok(self, tag: bytes) -> bool:
        peer_party = "satellite" if self.cfg.party == "ground" else "ground"
        expected = confirm_tag(
            self.s.shared_secret, self.s.transcript_hash, direction_label(peer_party)
        )
        return hmac.compare_digest(expected, tag)

    # events

    def on_pass_opened(self, event: PassOpened) -> None:
        self.s.in_pass = True
        self.s.retries.clear()
        self.s.last_progress_us = event.now_us
        self.s.last_request_us = event.now_us
        state = self.s.state
        if self.s.role is Role.KEY_HOLDER:
            if state is HandshakeState.IDLE:
                keypair = kem_keygen(self.s.keygen_seed)
                self.s.kem_operations += 1
                self.s.public_key = keypair.public_key
                self.s.secret_key = keypair.secret_key
                self.move(HandshakeState.TRANSFERRING_PK)
                self.publish(TransferObject.PK)
            elif state in (HandshakeState.TRANSFERRING_PK, HandshakeState.AWAITING_CT):
                self.nack(TransferObject.CT, self.s.ct_rx)
            elif state is HandshakeState.CONFIRMING:
                if self.bump_retry("confirm"):
                    self.send_confirm(retransmit=True)
        elif state is HandshakeState.TRANSFERRING_PK or (
            state is HandshakeState.IDLE and self.s.passes_seen > 0
        ):
            # on its first pass an idle encapsulator waits for the unsolicited key
            self.nack(TransferObject.PK, self.s.pk_rx)
        self.s.passes_seen += 1

    def on_tick(self, event: Tick) -> None:
        if not self.s.in_pass:
            return
        quiet_since = max(self.s.last_progress_us, self.s.last_request_us)
        if event.now_us - quiet_since < self.cfg.tick_interval_us:
            return
        state = self.s.state
        sent = len(self.out)
        if self.s.role is Role.KEY_HOLDER:
            if state in (HandshakeState.TRANSFERRING_PK, HandshakeState.AWAITING_CT):
                self.nack(TransferObject.CT, self.s.ct_rx)
            elif state is HandshakeState.CONFIRMING:
                if self.bump_retry("confirm"):
                    self.send_confirm(retransmit=True)
        elif state in (HandshakeState.IDLE, HandshakeState.TRANSFERRING_PK):
            self.nack(TransferObject.PK, self.s.pk_rx)
        if len(self.out) > sent:
            self.s.last_request_us = event.now_us

    def on_incoming(self, event: Incoming) -> None:
        message = self._accept(event.packet)
        if message is None or message.session_id != self.s.session_id:
            return
        if message.kind is MessageKind.PK_FRAGMENT:
            self._on_pk_fragment(message, event.now_us)
        elif message.kind is MessageKind.CT_FRAGMENT:
            self._on_ct_fragment(message, event.now_us)
        elif message.kind is MessageKind.FRAGMENT_NACK:
            self._on_nack(message.nack())
        elif message.kind is MessageKind.CONFIRM:
            self._on_confirm(message.body)
        else:
            self._on_confirm_ack(message.body)

    def _accept(self, raw: bytes) -> HandshakeMessage | None:
        stats = self.s.stats
        try:
            header = unpack_header(raw)
            if header.destination != self.cfg.local_address:
                stats.extra["misaddressed"] = stats.extra.get("misaddressed", 0) + 1
                return None
            payload = verify(
                raw,
                self.cfg.hmac_key,
                require_crc=self.cfg.crc_on,
                hmac_alg=self.cfg.hmac_alg,
                hmac_scope=self.cfg.hmac_scope,
                stats=stats,
            )
            return decode_message(
                payload,
                port=header.destination_port,
                pk_port=self.cfg.pk_port,
                ct_port=self.cfg.ct_port,
                control_port=self.cfg.control_port,
            )
        except BadHmac:
            self.s.hmac_rejects += 1
            logger.debug(
                "Session %d (%s) dropped packet with bad HMAC (%d so far)",
                self.s.session_id,
                self.cfg.party,
                self.s.hmac_rejects,
            )
            if self.s.hmac_rejects >= self.cfg.hmac_reject_limit:
                self.fail(FailureReason.HMAC_REJECTED)
        except LinkError as exc:
            logger.debug("Session %d dropped packet: %s", self.s.session_id, exc)
        except HandshakeError as exc:
            stats.extra["malformed"] = stats.extra.get("malformed", 0) + 1
            logger.debug("Session %d dropped message: %s", self.s.session_id, exc)
        return None

    def _store(
        self, buffer: Reassembler, message: HandshakeMessage, now_us: int
    ) -> bool:
        try:
            fresh = buffer.add(message.fragment())
        except IntegrityConflict as exc:
            stats = self.s.stats
            stats.extra["conflicts"] = stats.extra.get("conflicts", 0) + 1
            logger.debug("Session %d: %s", self.s.session_id, exc)
            return False
        if fresh:
            self.s.last_progress_us = now_us
        return fresh

    def _on_pk_fragment(self, message: HandshakeMessage, now_us: int) -> None:
        if self.s.role is not Role.ENCAPSULATOR:
            return
        if self.s.state is HandshakeState.IDLE:
            self.move(HandshakeState.TRANSFERRING_PK)
        if self.s.state is not HandshakeState.TRANSFERRING_PK:
            return
        if not self._store(self.s.pk_rx, message, now_us) or not self.s.pk_rx.complete:
            return
        public_key = self.absorb(self.s.pk_rx, MessageKind.PK_FRAGMENT)
        try:
            ciphertext, secret = kem_encaps(public_key, self.s.encaps_seed)
        except KemError:
            self.fail(FailureReason.MALFORMED_PEER_KEY)
            return
        self.s.kem_operations += 1
        self.s.public_key = public_key
        self.s.ciphertext = ciphertext.data
        self.s.pending_secret = secret.data
        self.move(HandshakeState.TRANSFERRING_CT)
        self.publish(TransferObject.CT)

    def _on_ct_fragment(self, message: HandshakeMessage, now_us: int) -> None:
        if self.s.role is not Role.KEY_HOLDER:
            return
        if self.s.state is HandshakeState.TRANSFERRING_PK:
            self.move(HandshakeState.AWAITING_CT)
        if self.s.state is not HandshakeState.AWAITING_CT:
            return
        if not self._store(self.s.ct_rx, message, now_us) or not self.s.ct_rx.complete:
            return
        ciphertext = self.absorb(self.s.ct_rx, MessageKind.CT_FRAGMENT)
        assert self.s.secret_key is not None
        secret = kem_decaps(self.s.secret_key, ciphertext)
        self.s.kem_operations += 1
        self.s.ciphertext = ciphertext
        self.s.shared_secret = secret.data
        self.s.confirm_sent = confirm_tag(
            secret, self.s.transcript_hash, direction_label(self.cfg.party)
        )
        self.move(HandshakeState.CONFIRMING)
        self.send_confirm(retransmit=False)

    def _on_nack(self, request: Nack) -> None:
        owned = (
            TransferObject.PK if self.s.role is Role.KEY_HOLDER else TransferObject.CT
        )
        if request.obj is not owned or self.s.is_terminal:
            return
        messages = self.fragments_of(owned)
        if not messages:
            return
        total = len(messages)
        if request.send_all:
            wanted = range(total)
        elif request.total != total:
            logger.debug(
                "Session %d ignores NACK with total %d",
                self.s.session_id,
                request.total,
            )
            return
        else:
            wanted = sorted(request.missing)
        for index in wanted:
            if not self.bump_retry(f"{owned.value}:{index}"):
                return
            self.send(messages[index], retransmit=True)

    def _on_confirm(self, tag: bytes) -> None:
        if self.s.role is not Role.ENCAPSULATOR:
            return
        if self.s.state is HandshakeState.ESTABLISHED:
            if self.peer_tag_ok(tag):
                self.send_confirm_ack(retransmit=True)
            return
        if self.s.state is not HandshakeState.TRANSFERRING_CT:
            return
        self.s.shared_secret = self.s.pending_secret
        self.s.pending_secret = None
        self.move(HandshakeState.CONFIRMING)
        matched = self.peer_tag_ok(tag)
        self.send_confirm_ack()
        if matched:
            self.move(HandshakeState.ESTABLISHED)
        else:
            self.fail(FailureReason.CONFIRM_MISMATCH)

    def _on_confirm_ack(self, tag: bytes) -> None:
        if (
            self.s.role is not Role.KEY_HOLDER
            or self.s.state is not HandshakeState.CONFIRMING
        ):
            return
        if self.peer_tag_ok(tag):
            self.move(HandshakeState.ESTABLISHED)
        else:
            self.fail(FailureReason.CONFIRM_MISMATCH)


def step(
    session: HandshakeSession, event: Event
) -> tuple[HandshakeSession, list[Outbound]]:
    """Apply one event; returns the successor session and the packets to send."""
    working = copy.deepcopy(session)
    stepper = _Stepper(working)
    if working.started_us is None:
        working.started_us = event.now_us

    if isinstance(event, PassClosed):
        working.in_pass = False
        return working, []
    if working.state is HandshakeState.FAILED:
        return working, []
    if (
        working.state is not HandshakeState.ESTABLISHED
        and event.now_us - working.started_us >= stepper.cfg.timeout_us
    ):
        stepper.fail(FailureReason.TIMEOUT)
        return working, []

    if isinstance(event, PassOpened):
        stepper.on_pass_opened(event)
    elif isinstance(event, Tick):
        stepper.on_tick(event)
    elif isinstance(event, Incoming):
        stepper.on_incoming(event)

    if not working.in_pass and stepper.out:
        logger.debug(
            "Session %d (%s) suppressed %d packets outside a pass",
            working.session_id,
            stepper.cfg.party,
            len(stepper.out),
        )
        return working, []
    return working, stepper.out
