"""Discrete-event run of a full ground/satellite handshake over intermittent passes.

Events sit in a heap keyed by (time, order, sequence). At equal times pass
openings come first, then deliveries, ticks and pass closings; the ground
station is always scheduled before the satellite. The radio channel is
half-duplex: one transmission at a time for both directions.
"""

from __future__ import annotations

import hashlib
import heapq
import hmac
import logging
from dataclasses import dataclass, field
from typing import Any

from pydantic import BaseModel, Field

from orbitkem.constants import (
    CSP_FLAG_CRC,
    CSP_FLAG_HMAC,
    DEFAULT_DATA_FRAMES,
    DEFAULT_HORIZON_S,
    FRAME_SEQUENCE_BYTES,
    GCM_TAG_BYTES,
    KEM_ENCAPS_SEED_BYTES,
    KEM_KEYGEN_SEED_BYTES,
)
from orbitkem.handshake.accounting import AccountingReport, bytes_over_air
from orbitkem.handshake.config import HandshakeConfig, Role
from orbitkem.handshake.session import (
    HandshakeSession,
    HandshakeState,
    Incoming,
    Outbound,
    PassClosed,
    PassOpened,
    Tick,
    direction_label,
    new_session,
    step,
)
from orbitkem.link.csp import CspHeader, pack_header, seal, unpack_header, verify
from orbitkem.link.errors import LinkError
from orbitkem.session.errors import SessionCryptoError
from orbitkem.session.frames import FrameOpener, FrameSealer
from orbitkem.session.keys import derive_keys
from orbitkem.sim.errors import HorizonExhausted, SimulationError
from orbitkem.sim.link_model import LinkModel, RadioLink
from orbitkem.sim.schedule import PassSchedule, windows
from orbitkem.sim.trace import SimTrace, TraceRecord

logger = logging.getLogger(__name__)

PARTIES = ("ground", "satellite")
_ORDER_OPEN, _ORDER_DELIVER, _ORDER_TICK, _ORDER_CLOSE = range(4)


class ExchangeConfig(BaseModel):
    handshake: HandshakeConfig = Field(default_factory=HandshakeConfig)
    schedule: PassSchedule = Field(default_factory=PassSchedule)
    link: LinkModel = Field(default_factory=LinkModel)
    horizon_s: int = Field(default=DEFAULT_HORIZON_S, gt=0)
    data_frames: int = Field(default=DEFAULT_DATA_FRAMES, ge=0)


def kem_seeds(run_seed: int) -> tuple[bytes, bytes]:
    """Keygen and encapsulation seeds for one run, derived with SHAKE-256."""
    stream = hashlib.shake_256(
        b"orbitkem/kem-seeds" + run_seed.to_bytes(8, "big")
    ).digest(KEM_KEYGEN_SEED_BYTES + KEM_ENCAPS_SEED_BYTES)
    return stream[:KEM_KEYGEN_SEED_BYTES], stream[KEM_KEYGEN_SEED_BYTES:]


@dataclass
class _Node:
    party: str
    session: HandshakeSession
    sealer: FrameSealer | None = None
    opener: FrameOpener | None = None
    frames_sent: int = 0
    frames_received: int = 0
    frames_rejected: int = 0


@dataclass
class ExchangeResult:
    ground: HandshakeSession
    satellite: HandshakeSession
    trace: SimTrace
    report: AccountingReport
    established_at_us: int | None = None
    frames_sent: dict[str, int] = field(default_factory=dict)
    frames_received: dict[str, int] = field(default_factory=dict)
    nonces: dict[str, list[bytes]] = field(default_factory=dict)
    corrupted_accepted: int = 0

    @property
    def established(self) -> bool:
        return (
            self.ground.state is HandshakeState.ESTABLISHED
            and self.satellite.state is HandshakeState.ESTABLISHED
        )

    @property
    def passes_used(self) -> int:
        return self.report.passes_used

    def summary(self) -> dict[str, Any]:
        return {
            "established": self.established,
            "ground_state": self.ground.state.value,
            "satellite_state": self.satellite.state.value,
            "ground_failure": (
                self.ground.failure.value if self.ground.failure else None
            ),
            "satellite_failure": (
                self.satellite.failure.value if self.satellite.failure else None
            ),
            "established_at_us": self.established_at_us,
            "passes_used": self.passes_used,
            "frames_sent": dict(self.frames_sent),
            "frames_received": dict(self.frames_received),
            "corrupted_accepted": self.corrupted_accepted,
            "accounting": self.report.model_dump(),
        }


class _Exchange:
    def __init__(self, config: ExchangeConfig) -> None:
        self.config = config
        own = config.handshake
        ground_cfg = own if own.party == "ground" else own.peer_config()
        sat_cfg = ground_cfg.peer_config()
        keygen_seed, encaps_seed = kem_seeds(config.link.rng_seed)
        self.nodes: dict[str, _Node] = {}
        for party, cfg in (("ground", ground_cfg), ("satellite", sat_cfg)):
            self.nodes[party] = _Node(
                party,
                new_session(
                    cfg,
                    keygen_seed=keygen_seed if cfg.role is Role.KEY_HOLDER else b"",
                    encaps_seed=encaps_seed if cfg.role is Role.ENCAPSULATOR else b"",
                ),
            )
        self.radio = RadioLink(config.link, config.schedule)
        self.trace = SimTrace()
        self.heap: list[tuple[int, int, int, str, str, Any]] = []
        self.counter = 0
        self.channel_free_at = 0
        self.established_at: int | None = None
        self.corrupted_accepted = 0
        self.in_flight = 0

    def push(
        self, t_us: int, order: int, party: str, kind: str, payload: Any = None
    ) -> None:
        heapq.heappush(self.heap, (t_us, order, self.counter, party, kind, payload))
        self.counter += 1

    def schedule_passes(self) -> None:
        tick = self.config.handshake.tick_interval_us
        for index, (open_us, close_us) in enumerate(
            windows(self.config.schedule, self.config.horizon_s)
        ):
            for party in PARTIES:
                self.push(open_us, _ORDER_OPEN, party, "open", index)
            t = open_us + tick
            while t < close_us:
                for party in PARTIES:
                    self.push(t, _ORDER_TICK, party, "tick")
                t += tick
            for party in PARTIES:
                self.push(close_us, _ORDER_CLOSE, party, "close")

    def peer_of(self, party: str) -> str:
        return "satellite" if party == "ground" else "ground"

    def radiate(
        self,
        now_us: int,
        party: str,
        wire: bytes,
        port: int,
        kind: str,
        retransmit: bool,
        payload_size: int,
    ) -> None:
        t_send = max(now_us, self.channel_free_at)
        sent = self.radio.transmit(t_send, wire)
        if sent.outcome != "out_of_window":
            self.channel_free_at = (
                t_send
                + self.config.link.serialization_us(len(wire))
                + self.config.link.turnaround_us
            )
        self.trace.append(
            TraceRecord(
                t_us=t_send,
                dir="up" if party == "ground" else "down",
                size=len(wire),
                outcome=sent.outcome,
                port=port,
                t_deliver_us=sent.t_deliver_us,
                kind=kind,
                retransmit=retransmit,
                pass_index=-1 if sent.window is None else sent.window,
                payload_size=payload_size,
            )
        )
        if sent.t_deliver_us is not None:
            self.in_flight += 1
            self.push(
                sent.t_deliver_us,
                _ORDER_DELIVER,
                self.peer_of(party),
                "deliver",
                (sent.packet, sent.outcome == "corrupted"),
            )

    def emit(self, now_us: int, party: str, outbound: list[Outbound]) -> None:
        for item in outbound:
            self.radiate(
                now_us,
                party,
                item.wire,
                item.port,
                item.message.kind.name,
                item.retransmit,
                len(item.message.payload()),
            )

    def advance(self, party: str, event: Any) -> None:
        node = self.nodes[party]
        node.session, outbound = step(node.session, event)
        self.emit(event.now_us, party, outbound)

    # data phase

    def both_established(self) -> bool:
        return all(
            n.session.state is HandshakeState.ESTABLISHED for n in self.nodes.values()
        )

    def start_data(self, now_us: int) -> None:
        ground = self.nodes["ground"].session
        satellite = self.nodes["satellite"].session
        if ground.shared_secret is None or not hmac.compare_digest(
            ground.shared_secret, satellite.shared_secret or b""
        ):
            raise SimulationError("Established parties disagree on the shared secret.")
        if self.established_at is None:
            self.established_at = now_us
            logger.info("Handshake established at t=%.3fs", now_us / 1e6)
        for party, node in self.nodes.items():
            secret = node.session.shared_secret
            assert secret is not None
            node.sealer = FrameSealer(derive_keys(secret, direction_label(party)))
            node.opener = FrameOpener(
                derive_keys(secret, direction_label(self.peer_of(party)))
            )
        for party in PARTIES:
            self.send_data(now_us, party)

    def send_data(self, now_us: int, party: str) -> None:
        node = self.nodes[party]
        if node.sealer is None or not node.session.in_pass:
            return
        cfg = node.session.config
        flags = (CSP_FLAG_CRC if cfg.crc_on else 0) | (
            CSP_FLAG_HMAC if cfg.hmac_on else 0
        )
        header = CspHeader(
            priority=cfg.priority,
            source=cfg.local_address or 0,
            destination=cfg.peer_address or 0,
            destination_port=cfg.data_port,
            source_port=cfg.source_port,
            flags=flags,
        )
        # plaintext is clipped from the front so the frame number survives small MTUs
        room = cfg.mtu - FRAME_SEQUENCE_BYTES - GCM_TAG_BYTES
        while node.frames_sent < self.config.data_frames:
            plaintext = f"{party} frame {node.frames_sent}".encode("ascii")[-room:]
            frame = node.sealer.seal(plaintext, aad=pack_header(header))
            packet = seal(
                header,
                frame.to_bytes(),
                crc_on=cfg.crc_on,
                hmac_key=cfg.hmac_key,
                mtu=cfg.mtu,
                hmac_alg=cfg.hmac_alg,
                hmac_scope=cfg.hmac_scope,
            )
            node.frames_sent += 1
            self.radiate(
                now_us,
                party,
                packet.to_bytes(),
                cfg.data_port,
                "DATA",
                False,
                len(packet.payload),
            )

    def receive_data(self, party: str, raw: bytes) -> None:
        node = self.nodes[party]
        cfg = node.session.config
        try:
            payload = verify(
                raw,
                cfg.hmac_key,
                require_crc=cfg.crc_on,
                hmac_alg=cfg.hmac_alg,
                hmac_scope=cfg.hmac_scope,
            )
            if node.opener is None:
                raise SessionCryptoError("No session keys yet.")
            node.opener.open(payload, aad=raw[:4])
        except (LinkError, SessionCryptoError) as exc:
            node.frames_rejected += 1
            logger.debug("%s rejected data frame: %s", party, exc)
            return
        node.frames_received += 1

    def deliver(self, now_us: int, party: str, packet: bytes, corrupted: bool) -> None:
        self.in_flight -= 1
        node = self.nodes[party]
        try:
            port = unpack_header(packet).destination_port
        except LinkError:
            port = -1
        if port == node.session.config.data_port:
            before = node.frames_received
            self.receive_data(party, packet)
            if corrupted and node.frames_received > before:
                self.corrupted_accepted += 1
            return
        before = node.session.stats.verified
        self.advance(party, Incoming(now_us, packet))
        if corrupted and node.session.stats.verified > before:
            self.corrupted_accepted += 1

    def finished(self) -> bool:
        sessions = [n.session for n in self.nodes.values()]
        if not all(s.is_terminal for s in sessions):
            return False
        if self.both_established():
            return (
                all(
                    n.frames_sent >= self.config.data_frames
                    for n in self.nodes.values()
                )
                and self.in_flight == 0
            )
        return True

    def run(self) -> ExchangeResult:
        self.schedule_passes()
        while self.heap and not self.finished():
            t_us, _, _, party, kind, payload = heapq.heappop(self.heap)
            node = self.nodes[party]
            if kind == "open":
                self.advance(party, PassOpened(t_us, payload))
                if (
                    self.both_established()
                    and node.frames_sent < self.config.data_frames
                ):
                    self.send_data(t_us, party)
            elif kind == "tick":
                self.advance(party, Tick(t_us))
            elif kind == "close":
                self.advance(party, PassClosed(t_us))
            else:
                packet, corrupted = payload
                self.deliver(t_us, party, packet, corrupted)
            if self.both_established() and self.nodes["ground"].sealer is None:
                self.start_data(t_us)
        result = self.result()
        if not self.finished() and not self.both_established():
            raise HorizonExhausted(
                f"Horizon of {self.config.horizon_s}s ended with ground "
                f"{result.ground.state.value} and satellite "
                f"{result.satellite.state.value}.",
                result,
            )
        return result

    def result(self) -> ExchangeResult:
        return ExchangeResult(
            ground=self.nodes["ground"].session,
            satellite=self.nodes["satellite"].session,
            trace=self.trace,
            report=bytes_over_air(self.trace),
            established_at_us=self.established_at,
            frames_sent={p: n.frames_sent for p, n in self.nodes.items()},
            frames_received={p: n.frames_received for p, n in self.nodes.items()},
            nonces={
                p: list(n.sealer.nonces) if n.sealer else []
                for p, n in self.nodes.items()
            },
            corrupted_accepted=self.corrupted_accepted,
        )


def run_exchange(config: ExchangeConfig) -> ExchangeResult:
    """Drive both handshake machines until they settle or the horizon ends."""
    return _Exchange(config).run()
