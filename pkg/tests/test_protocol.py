import struct
from fractions import Fraction
from threading import Lock

import pytest
from hypothesis import HealthCheck, given, settings, strategies as st

from conftest import make_topology, pay
from modules.network import FeeSchedule
from modules.protocol import (
    MsgType, HopCapacity, Message, EncodeError, DecodeError, FrameReader, encode, decode, PROBE_TYPES,
    NodeState, SubStatus, NodeServer,
)
from modules.simnet import Engine, PaymentSession

U32, U64 = (1 << 32) - 1, (1 << 64) - 1

hops = st.builds(HopCapacity, *[st.integers(0, U64)] * 4)


@st.composite
def messages(draw):
    path = tuple(draw(st.lists(st.integers(0, U32), min_size=2, max_size=8, unique=True)))
    msg_type = draw(st.sampled_from(MsgType))
    capacity = tuple(draw(st.lists(hops, max_size=len(path) - 1)))
    commit = 0 if msg_type in PROBE_TYPES else draw(st.integers(1, U64))
    return Message(draw(st.integers(0, U64)), msg_type, path, capacity, commit)


class TestCodec:

    @given(messages())
    def test_round_trip(self, msg):
        assert decode(encode(msg)) == msg

    def test_probe_path(self):
        msg = Message(7, MsgType.PROBE, (1, 2, 3, 4))
        frame = encode(msg)
        assert struct.unpack('>I', frame[:4])[0] == len(frame) - 4
        assert decode(frame).path == (1, 2, 3, 4)

    @pytest.mark.parametrize('msg', [
        Message(1, MsgType.PROBE, ()),
        Message(1, MsgType.PROBE, (1,)),
        Message(1, MsgType.PROBE, (1, 2, 1)),
        Message(1, MsgType.COMMIT, (1, 2), (), 0),
        Message(1, MsgType.PROBE, (1, 2), (), 5),
        Message(1, MsgType.PROBE, (1, 2), (HopCapacity(1, 1, 0, 0),) * 2),
        Message(-1, MsgType.PROBE, (1, 2)),
    ])
    def test_encode_rejects(self, msg):
        with pytest.raises(EncodeError):
            encode(msg)

    @given(messages(), st.data())
    def test_corrupted_frames(self, msg, data):
        frame = bytearray(encode(msg))
        i = data.draw(st.integers(0, len(frame) - 1))
        frame[i] ^= data.draw(st.integers(1, 255))
        try:
            decoded = decode(bytes(frame))
        except DecodeError:
            return
        assert isinstance(decoded, Message)

    @given(st.binary(max_size=64))
    def test_garbage(self, blob):
        try:
            decode(blob)
        except DecodeError:
            pass

    @pytest.mark.slow
    @settings(max_examples=10_000, deadline=None, suppress_health_check=[HealthCheck.too_slow])
    @given(messages())
    def test_round_trip_many(self, msg):
        assert decode(encode(msg)) == msg

    @pytest.mark.slow
    @settings(max_examples=10_000, deadline=None, suppress_health_check=[HealthCheck.too_slow])
    @given(messages(), st.binary(min_size=1, max_size=8), st.data())
    def test_mutated_frames_many(self, msg, noise, data):
        frame = bytearray(encode(msg))
        i = data.draw(st.integers(0, len(frame) - 1))
        frame[i:i + len(noise)] = noise
        try:
            decode(bytes(frame))
        except DecodeError:
            pass

    def test_truncated(self):
        frame = encode(Message(1, MsgType.COMMIT, (1, 2, 3), (), 9))
        for cut in (0, 3, 10, len(frame) - 1):
            with pytest.raises(DecodeError):
                decode(frame[:cut])

    def test_unknown_type(self):
        frame = bytearray(encode(Message(1, MsgType.PROBE, (1, 2))))
        frame[12] = 42
        with pytest.raises(DecodeError, match='unknown message type'):
            decode(bytes(frame))

    def test_frame_reader(self):
        a = encode(Message(1, MsgType.PROBE, (1, 2)))
        b = encode(Message(2, MsgType.COMMIT, (3, 4, 5), (), 11))
        stream = a + b
        reader = FrameReader()
        assert reader.feed(stream[:5]) == []
        got = reader.feed(stream[5:len(a) + 3]) + reader.feed(stream[len(a) + 3:])
        assert [m.trans_id for m in got] == [1, 2]
        assert not reader.buffer


class TestNode:

    def test_trans_ids_are_unique_per_node(self, line4):
        a, b = NodeState(1, line4), NodeState(2, line4)
        ids = {a.next_trans_id() for _ in range(3)} | {b.next_trans_id() for _ in range(3)}
        assert len(ids) == 6
        assert a.next_trans_id() >> 32 == 1

    def test_duplicate_commit(self, line4):
        node = NodeState(0, line4)
        msg = Message(5, MsgType.COMMIT, (0, 1, 2), (), 10)
        assert node.handle(msg) == [(1, msg)]
        assert node.handle(msg) == []
        assert node.held() == 10 and line4.balance(0, 1) == 90

    def test_unknown_confirm_dropped(self, line4):
        node = NodeState(1, line4)
        assert node.handle(Message(9, MsgType.CONFIRM, (0, 1, 2), (), 4)) == []

    def test_not_on_path(self, line4):
        node = NodeState(3, line4)
        assert node.handle(Message(9, MsgType.PROBE, (0, 1))) == []


def session_for(topology, sender, receiver, demand=1):
    engine = Engine(topology)
    return engine, PaymentSession(engine, pay(sender, receiver, demand))


class TestProbing:

    def test_one_hop(self):
        top = make_topology([(0, 1, 7, 5)], fees={(0, 1): 3000})
        _, session = session_for(top, 0, 1)
        [hop] = session.probe((0, 1))
        assert (hop.forward, hop.reverse) == (7, 5)
        assert hop.forward_rate * 1_000_000 == 3000

    def test_rate_rounded_to_ppm(self):
        top = make_topology([(0, 1, 7, 5)])
        top.set_fee(0, 1, FeeSchedule(0, Fraction(1, 3)))
        _, session = session_for(top, 0, 1)
        [hop] = session.probe((0, 1))
        assert hop.forward_rate == Fraction(333333, 1_000_000)
        assert top.fee(0, 1).rate == Fraction(1, 3)

    def test_two_hops_in_order(self):
        top = make_topology([(0, 1, 7, 5), (1, 2, 4, 9)])
        engine, session = session_for(top, 0, 2)
        hops = session.probe((0, 1, 2))
        assert [(h.forward, h.reverse) for h in hops] == [(7, 5), (4, 9)]
        # out to 1 and 2, back through 1 to 0
        assert engine.delivered == 4
        assert engine.probe_messages(1) == 4

    def test_missing_channel(self):
        top = make_topology([(0, 1, 7, 5), (2, 3, 1, 1)])
        _, session = session_for(top, 0, 3)
        assert session.probe((0, 1, 3)) is None
        assert session.lost_probes == 1

    def test_stale_probe(self, line4):
        engine, session = session_for(line4, 0, 2)
        hops = session.probe((0, 1, 2))
        line4.debit(1, 2, 100)
        assert hops[1].forward == 100
        _, status = session.commit((0, 1, 2), 10)
        assert status is SubStatus.NACKED


class TestCommit:

    @pytest.fixture
    def top(self):
        return make_topology([(0, 1, 10, 10), (1, 2, 10, 10)])

    def test_holds(self, top):
        engine, session = session_for(top, 0, 2, 4)
        _, status = session.commit((0, 1, 2), 4)
        assert status is SubStatus.ACKED
        assert engine.n_holds() == 2
        assert engine.held() == {(0, 1): 4, (1, 2): 4}
        assert top.balance(0, 1) == 6 and top.balance(1, 2) == 6

    def test_nack_releases_upstream(self, top):
        top.set_balance(1, 2, 3)
        engine, session = session_for(top, 0, 2, 4)
        _, status = session.commit((0, 1, 2), 4)
        assert status is SubStatus.NACKED
        assert engine.n_holds() == 0
        assert top.balance(0, 1) == 10 and top.balance(1, 2) == 3

    def test_nack_at_sender(self, top):
        engine, session = session_for(top, 0, 2, 11)
        _, status = session.commit((0, 1, 2), 11)
        assert status is SubStatus.NACKED
        assert engine.delivered == 0

    def test_exact_balance(self, top):
        _, session = session_for(top, 0, 2, 10)
        _, status = session.commit((0, 1, 2), 10)
        assert status is SubStatus.ACKED
        assert top.balance(0, 1) == 0


class TestFinalize:

    @pytest.fixture
    def top(self, diamond):
        return diamond

    def test_confirm_both(self, top):
        engine, session = session_for(top, 0, 3, 30)
        session.commit_all([((0, 1, 3), 20), ((0, 2, 3), 10)])
        assert session.finalize()
        assert session.txn.delivered() == 30
        assert engine.n_holds() == 0 and not engine.queue
        assert (top.balance(0, 1), top.balance(1, 0)) == (30, 70)
        assert (top.balance(2, 3), top.balance(3, 2)) == (50, 70)
        assert top.channel_total(0, 1) == 100

    def test_one_nacked_reverses_all(self, top):
        before = {e: s.balance for e, s in top.channels.items()}
        engine, session = session_for(top, 0, 3, 75)
        session.commit_all([((0, 1, 3), 40), ((0, 2, 3), 35)])
        assert [s.status for s in session.txn.subs.values()] == [SubStatus.ACKED, SubStatus.NACKED]
        assert not session.finalize()
        assert engine.n_holds() == 0
        assert {e: s.balance for e, s in top.channels.items()} == before
        assert session.txn.with_status(SubStatus.REVERSED)[0].amount == 40

    def test_nothing_to_finalize(self, top):
        engine, session = session_for(top, 0, 3)
        assert session.finalize()
        assert engine.delivered == 0

    def test_overlap_leaves_holds_in_flight(self, top):
        engine = Engine(top)
        session = PaymentSession(engine, pay(0, 3, 5), overlap=True)
        session.commit((0, 1, 3), 5)
        assert session.finalize()
        assert engine.queue and engine.n_holds() == 2
        engine.drain()
        assert engine.n_holds() == 0
        assert top.balance(3, 1) == 45


class TestSocketTransport:

    def test_probe_and_commit_over_tcp(self):
        ledger = make_topology([(0, 1, 7, 5), (1, 2, 4, 9)])
        book, lock = {}, Lock()
        servers = [NodeServer(NodeState(u, ledger), address_book=book, ledger_lock=lock).start() for u in (0, 1, 2)]
        try:
            sender = servers[0]
            tid = sender.node.next_trans_id()
            sender.submit(Message(tid, MsgType.PROBE, (0, 1, 2)))
            [ack] = sender.wait_replies(tid)
            assert ack.msg_type is MsgType.PROBE_ACK
            assert [(h.forward, h.reverse) for h in ack.capacity] == [(7, 5), (4, 9)]

            tid = sender.node.next_trans_id()
            sender.submit(Message(tid, MsgType.COMMIT, (0, 1, 2), (), 4))
            [ack] = sender.wait_replies(tid)
            assert ack.msg_type is MsgType.COMMIT_ACK
            with lock:
                assert ledger.balance(0, 1) == 3 and ledger.balance(1, 2) == 0
        finally:
            for s in servers:
                s.stop()
