import pytest

from orbitkem.constants import PORT_CONTROL, PORT_CT_FRAGMENT, TICK_INTERVAL_US
from orbitkem.handshake import (
    FailureReason,
    HandshakeConfig,
    HandshakeMessage,
    HandshakeState,
    Incoming,
    MessageKind,
    Nack,
    PassClosed,
    PassOpened,
    Role,
    SnapshotError,
    Tick,
    TransferObject,
    confirm_tag,
    direction_label,
    new_session,
    restore_session,
    snapshot_session,
    step,
)
from orbitkem.handshake.errors import HandshakeError
from orbitkem.link import CspHeader, seal
from orbitkem.session import derive_keys

KEYGEN_SEED = bytes(range(64))
ENCAPS_SEED = bytes(range(100, 132))


def make_pair(**overrides):
    ground_config = HandshakeConfig(party="ground", **overrides)
    ground = new_session(ground_config, keygen_seed=KEYGEN_SEED)
    satellite = new_session(ground_config.peer_config(), encaps_seed=ENCAPS_SEED)
    return ground, satellite


def open_pass(ground, satellite, now=0, index=0):
    ground, ground_out = step(ground, PassOpened(now, index))
    satellite, sat_out = step(satellite, PassOpened(now, index))
    queue = [("satellite", o) for o in ground_out] + [("ground", o) for o in sat_out]
    return ground, satellite, queue


def deliver(ground, satellite, target, wire, now):
    if target == "satellite":
        satellite, out = step(satellite, Incoming(now, wire))
        return ground, satellite, [("ground", o) for o in out]
    ground, out = step(ground, Incoming(now, wire))
    return ground, satellite, [("satellite", o) for o in out]


def pump(ground, satellite, queue, now=1, tamper=None):
    """Deliver queued packets in order until both sides fall silent."""
    sent = []
    while queue:
        target, outbound = queue.pop(0)
        sent.append(outbound)
        wire = tamper(outbound) if tamper else outbound.wire
        if wire is None:
            continue
        ground, satellite, replies = deliver(ground, satellite, target, wire, now)
        queue.extend(replies)
    return ground, satellite, sent


def control_packet(config, message, *, key=None):
    header = CspHeader(
        priority=2,
        source=config.peer_address,
        destination=config.local_address,
        destination_port=PORT_CONTROL,
        source_port=32,
    )
    return seal(
        header, message.encode(), crc_on=True, hmac_key=key or config.link_key
    ).to_bytes()


def test_lossless_handshake_establishes_equal_secrets():
    ground, satellite, queue = open_pass(*make_pair())
    ground, satellite, sent = pump(ground, satellite, queue)
    assert ground.state is HandshakeState.ESTABLISHED
    assert satellite.state is HandshakeState.ESTABLISHED
    assert ground.shared_secret == satellite.shared_secret
    assert ground.transcript_hash == satellite.transcript_hash
    assert ground.kem_operations == 2 and satellite.kem_operations == 1
    assert all(ground.shared_secret not in o.wire for o in sent)
    kinds = [o.message.kind for o in sent]
    assert kinds.count(MessageKind.PK_FRAGMENT) == 5
    assert kinds.count(MessageKind.CT_FRAGMENT) == 4
    assert kinds[-2:] == [MessageKind.CONFIRM, MessageKind.CONFIRM_ACK]


def test_satellite_can_hold_the_key():
    ground_config = HandshakeConfig(party="ground", role=Role.ENCAPSULATOR)
    ground = new_session(ground_config, encaps_seed=ENCAPS_SEED)
    satellite = new_session(ground_config.peer_config(), keygen_seed=KEYGEN_SEED)
    assert satellite.role is Role.KEY_HOLDER
    ground, satellite, queue = open_pass(ground, satellite)
    ground, satellite, _ = pump(ground, satellite, queue)
    assert ground.state is satellite.state is HandshakeState.ESTABLISHED
    assert ground.shared_secret == satellite.shared_secret


def test_handshake_is_deterministic():
    first = pump(*open_pass(*make_pair()))[2]
    second = pump(*open_pass(*make_pair()))[2]
    assert [o.wire for o in first] == [o.wire for o in second]


def test_step_does_not_mutate_its_input():
    ground, _ = make_pair()
    before = snapshot_session(ground)
    after, out = step(ground, PassOpened(0))
    assert snapshot_session(ground) == before
    assert ground.state is HandshakeState.IDLE and ground.public_key is None
    assert after.state is HandshakeState.TRANSFERRING_PK
    assert len(out) == 5


def test_new_session_checks_seed_lengths():
    with pytest.raises(HandshakeError):
        new_session(HandshakeConfig(party="ground"), keygen_seed=bytes(32))
    with pytest.raises(HandshakeError):
        new_session(HandshakeConfig(party="satellite"))


def test_resume_after_pass_requests_only_missing_fragment():
    ground, satellite, queue = open_pass(*make_pair())
    for index, (_, outbound) in enumerate(queue):
        if index != 3:
            satellite, _ = step(satellite, Incoming(1, outbound.wire))
    satellite, _ = step(satellite, PassClosed(2))
    ground, _ = step(ground, PassClosed(2))
    assert satellite.pk_rx.missing == frozenset({3})

    resumed = restore_session(snapshot_session(satellite))
    assert snapshot_session(resumed) == snapshot_session(satellite)

    later = 5_700_000_000
    resumed, out = step(resumed, PassOpened(later, 1))
    assert len(out) == 1
    request = out[0].message.nack()
    assert request == Nack(TransferObject.PK, 5, frozenset({3}))

    ground, ground_out = step(ground, PassOpened(later, 1))
    queue = [("satellite", o) for o in ground_out] + [("ground", o) for o in out]
    ground, resumed, sent = pump(ground, resumed, queue, now=later + 1)
    resent = [o for o in sent if o.message.kind is MessageKind.PK_FRAGMENT]
    assert len(resent) == 1 and resent[0].retransmit
    assert resent[0].message.fragment().header.index == 3
    assert ground.state is resumed.state is HandshakeState.ESTABLISHED
    assert ground.shared_secret == resumed.shared_secret


def test_tampered_ciphertext_fragment_is_dropped_then_recovered():
    ground, satellite, queue = open_pass(*make_pair(crc_on=False))
    tampered = []

    def flip_first_ct(outbound):
        if outbound.port == PORT_CT_FRAGMENT and not tampered:
            tampered.append(outbound)
            wire = bytearray(outbound.wire)
            wire[20] ^= 0x40
            return bytes(wire)
        return outbound.wire

    ground, satellite, _ = pump(ground, satellite, queue, tamper=flip_first_ct)
    assert ground.hmac_rejects == 1
    assert ground.stats.bad_hmac == 1
    assert ground.state is HandshakeState.AWAITING_CT
    assert ground.ct_rx.missing == frozenset({0})

    ground, out = step(ground, Tick(TICK_INTERVAL_US + 1))
    assert [o.message.nack().missing for o in out] == [frozenset({0})]
    queue = [("satellite", o) for o in out]
    ground, satellite, _ = pump(ground, satellite, queue, now=TICK_INTERVAL_US + 2)
    assert ground.state is satellite.state is HandshakeState.ESTABLISHED
    assert ground.shared_secret == satellite.shared_secret


def test_forged_confirm_tag_fails_the_encapsulator():
    ground, satellite, queue = open_pass(*make_pair(crc_on=False, hmac_on=False))

    def flip_confirm(outbound):
        if outbound.message.kind is MessageKind.CONFIRM:
            return outbound.wire[:-1] + bytes([outbound.wire[-1] ^ 0x01])
        return outbound.wire

    ground, satellite, _ = pump(ground, satellite, queue, tamper=flip_confirm)
    assert satellite.state is HandshakeState.FAILED
    assert satellite.failure is FailureReason.CONFIRM_MISMATCH


def test_undetected_ciphertext_tamper_ends_in_confirm_mismatch():
    ground, satellite, queue = open_pass(*make_pair(crc_on=False, hmac_on=False))
    tampered = []

    def flip_first_ct(outbound):
        if outbound.port == PORT_CT_FRAGMENT and not tampered:
            tampered.append(outbound)
            wire = bytearray(outbound.wire)
            wire[20] ^= 0x40
            return bytes(wire)
        return outbound.wire

    ground, satellite, _ = pump(ground, satellite, queue, tamper=flip_first_ct)
    assert ground.kem_operations == 2
    assert len(ground.shared_secret) == 32
    assert ground.shared_secret != satellite.shared_secret
    assert ground.state is satellite.state is HandshakeState.FAILED
    assert ground.failure is FailureReason.CONFIRM_MISMATCH
    assert satellite.failure is FailureReason.CONFIRM_MISMATCH


def test_fragment_replayed_from_another_exchange_fails_confirmation():
    ground, satellite = make_pair()
    earlier = new_session(satellite.config, encaps_seed=bytes(32))
    _, _, old = pump(*open_pass(ground, earlier))
    stale = next(o.wire for o in old if o.port == PORT_CT_FRAGMENT)

    ground, satellite, queue = open_pass(ground, satellite)
    swapped = []

    def replay_first_ct(outbound):
        if outbound.port == PORT_CT_FRAGMENT and not swapped:
            swapped.append(outbound)
            return stale
        return outbound.wire

    ground, satellite, _ = pump(ground, satellite, queue, tamper=replay_first_ct)
    assert swapped[0].wire != stale
    # the stale packet carries a valid link HMAC
    assert ground.hmac_rejects == 0
    assert ground.transcript_hash != satellite.transcript_hash
    assert ground.failure is FailureReason.CONFIRM_MISMATCH
    assert satellite.failure is FailureReason.CONFIRM_MISMATCH


def test_dropped_fragment_arriving_after_repair_is_ignored():
    ground, satellite, queue = open_pass(*make_pair())
    held = []

    def hold_first_ct(outbound):
        if outbound.port == PORT_CT_FRAGMENT and not held:
            held.append(outbound.wire)
            return None
        return outbound.wire

    ground, satellite, _ = pump(ground, satellite, queue, tamper=hold_first_ct)
    assert ground.ct_rx.missing == frozenset({0})
    ground, out = step(ground, Tick(TICK_INTERVAL_US + 1))
    queue = [("satellite", o) for o in out]
    ground, satellite, _ = pump(ground, satellite, queue, now=TICK_INTERVAL_US + 2)
    assert ground.state is satellite.state is HandshakeState.ESTABLISHED
    transcript = ground.transcript_hash

    ground, out = step(ground, Incoming(TICK_INTERVAL_US + 3, held[0]))
    assert out == []
    assert ground.state is HandshakeState.ESTABLISHED
    assert ground.transcript_hash == satellite.transcript_hash == transcript
    assert ground.shared_secret == satellite.shared_secret


def test_confirm_tag_binds_transcript_and_direction():
    ss = bytes(range(32))
    t1, t2 = bytes(32), bytes([1]) + bytes(31)
    up = direction_label("ground")
    down = direction_label("satellite")
    assert len(confirm_tag(ss, t1, up)) == 16
    assert confirm_tag(ss, t1, up) != confirm_tag(ss, t2, up)
    assert confirm_tag(ss, t1, up) != confirm_tag(ss, t1, down)
    with pytest.raises(HandshakeError):
        confirm_tag(None, t1, up)


def test_timeout_fails_an_unfinished_session():
    ground, _ = make_pair()
    ground, _ = step(ground, PassOpened(0))
    ground, out = step(ground, Tick(ground.config.timeout_us))
    assert out == []
    assert ground.failure is FailureReason.TIMEOUT


def test_repeated_nacks_exhaust_retries():
    ground, satellite, queue = open_pass(*make_pair())
    for _, outbound in queue:
        satellite, _ = step(satellite, Incoming(1, outbound.wire))
    assert satellite.state is HandshakeState.TRANSFERRING_CT

    request = HandshakeMessage(
        MessageKind.FRAGMENT_NACK,
        1,
        Nack(TransferObject.CT, 4, frozenset({0})).encode(),
    )
    packet = control_packet(satellite.config, request)
    for attempt in range(satellite.config.max_retries):
        satellite, out = step(satellite, Incoming(2 + attempt, packet))
        assert len(out) == 1 and out[0].retransmit
    satellite, out = step(satellite, Incoming(100, packet))
    assert out == []
    assert satellite.failure is FailureReason.MAX_RETRIES_EXCEEDED


def test_too_many_forged_packets_fail_the_session():
    ground, _ = make_pair(hmac_reject_limit=3)
    ground, _ = step(ground, PassOpened(0))
    request = HandshakeMessage(
        MessageKind.FRAGMENT_NACK, 1, Nack(TransferObject.PK, 0, frozenset()).encode()
    )
    forged = control_packet(ground.config, request, key=bytes(16))
    for now in (1, 2):
        ground, out = step(ground, Incoming(now, forged))
        assert out == []
    assert ground.state is HandshakeState.TRANSFERRING_PK
    ground, _ = step(ground, Incoming(3, forged))
    assert ground.failure is FailureReason.HMAC_REJECTED


def test_misaddressed_packet_is_counted_and_ignored():
    ground, satellite, queue = open_pass(*make_pair())
    _, outbound = queue[0]
    ground_again, out = step(ground, Incoming(1, outbound.wire))
    assert out == []
    assert ground_again.stats.extra["misaddressed"] == 1
    assert ground_again.state is ground.state


def test_nothing_is_sent_outside_a_pass():
    ground, _ = make_pair()
    ground, _ = step(ground, PassOpened(0))
    ground, _ = step(ground, PassClosed(1))
    request = HandshakeMessage(
        MessageKind.FRAGMENT_NACK, 1, Nack(TransferObject.PK, 0, frozenset()).encode()
    )
    ground, out = step(ground, Incoming(2, control_packet(ground.config, request)))
    assert out == []
    ground, out = step(ground, Tick(10 * TICK_INTERVAL_US))
    assert out == []


def test_snapshot_rejects_foreign_bytes():
    with pytest.raises(SnapshotError):
        restore_session(b"NOPE" + bytes(10))
    ground, _ = make_pair()
    blob = snapshot_session(ground)
    with pytest.raises(SnapshotError):
        restore_session(blob[:-1])


def test_session_repr_hides_secrets():
    ground, satellite, queue = open_pass(*make_pair())
    ground, _, _ = pump(ground, satellite, queue)
    assert ground.shared_secret.hex() not in repr(ground)
    assert "link_key" not in repr(ground)


def _two_pass_run(resume_between_passes: bool):
    """Pass 0 loses pk fragment 3; pass 1 repairs it. Returns every wire sent."""
    ground, satellite, queue = open_pass(*make_pair())
    sent = [o.wire for _, o in queue]
    for index, (_, outbound) in enumerate(queue):
        if index != 3:
            satellite, _ = step(satellite, Incoming(1, outbound.wire))
    ground, _ = step(ground, PassClosed(2))
    satellite, _ = step(satellite, PassClosed(2))
    if resume_between_passes:
        ground = restore_session(snapshot_session(ground))
        satellite = restore_session(snapshot_session(satellite))
    ground, satellite, queue = open_pass(ground, satellite, now=5_700_000_000, index=1)
    ground, satellite, rest = pump(ground, satellite, queue, now=5_700_000_001)
    return ground, satellite, sent + [o.wire for o in rest]


def test_restored_sessions_replay_the_control_run_exactly():
    control = _two_pass_run(resume_between_passes=False)
    resumed = _two_pass_run(resume_between_passes=True)
    assert resumed[2] == control[2]
    assert resumed[0].state is HandshakeState.ESTABLISHED
    assert resumed[0].shared_secret == control[0].shared_secret


def assert_secrets_agree(ground, satellite):
    assert HandshakeState.FAILED not in (ground.state, satellite.state)
    for settled, other in ((ground, satellite), (satellite, ground)):
        if settled.state is HandshakeState.ESTABLISHED:
            assert other.shared_secret == settled.shared_secret
    if ground.state is satellite.state is HandshakeState.ESTABLISHED:
        assert ground.transcript_hash == satellite.transcript_hash
        for party in ("ground", "satellite"):
            label = direction_label(party)
            ground_keys = derive_keys(ground.shared_secret, label)
            assert ground_keys == derive_keys(satellite.shared_secret, label)


def explore(ground, satellite, queue, budget, now, seen):
    """Try dropping, delivering and duplicating each of the next `budget` packets."""
    assert_secrets_agree(ground, satellite)
    seen.append((ground.state, satellite.state))
    if budget == 0:
        return
    if not queue:
        if ground.is_terminal and satellite.is_terminal:
            return
        now += TICK_INTERVAL_US
        ground, ground_out = step(ground, Tick(now))
        satellite, sat_out = step(satellite, Tick(now))
        queue = [("satellite", o) for o in ground_out]
        queue += [("ground", o) for o in sat_out]
        if not queue:
            return
    (target, outbound), rest = queue[0], queue[1:]
    for copies in range(3):
        g, s, pending = ground, satellite, list(rest)
        for _ in range(copies):
            g, s, replies = deliver(g, s, target, outbound.wire, now + 1)
            pending.extend(replies)
        explore(g, s, pending, budget - 1, now + 1, seen)


@pytest.mark.slow
def test_every_short_lossy_trace_keeps_secrets_equal():
    # one fragment per object: PK, CT, CONFIRM, CONFIRM_ACK
    ground, satellite, queue = open_pass(*make_pair(mtu=1024))
    assert len(queue) == 1
    seen = []
    explore(ground, satellite, queue, 6, 1, seen)
    both = (HandshakeState.ESTABLISHED, HandshakeState.ESTABLISHED)
    assert both in seen
    assert (HandshakeState.CONFIRMING, HandshakeState.ESTABLISHED) in seen
    assert len(seen) > 300
