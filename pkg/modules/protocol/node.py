# per-node message handlers: probing, holds of the two-phase commit, confirm and reverse

import logging
from dataclasses import dataclass
from enum import Enum
from typing import Dict, List, Tuple

from modules.network.topology import Topology, NodeId, Edge, InvalidParameter, PPM
from modules.protocol.message import Message, MsgType, HopCapacity, REPLY_TYPES

logger = logging.getLogger(__name__)

Outbound = List[Tuple[NodeId, Message]]


class HoldPhase(Enum):
    COMMITTED = 'committed'
    CONFIRMED = 'confirmed'
    REVERSED = 'reversed'


@dataclass
class PendingHold:
    trans_id: int
    edge: Edge
    amount: int
    phase: HoldPhase = HoldPhase.COMMITTED


class NodeState:
    '''
    One node of the network. It only touches the ledger entries of its own channels;
    every message is forwarded to the next node of the message's path, and replies that
    reach their final node (the sender) are parked in `replies` for the sender logic.
    '''

    def __init__(self, node_id: NodeId, ledger: Topology):
        self.id = node_id
        self.ledger = ledger
        self.holds: Dict[int, PendingHold] = {}
        self.replies: Dict[int, List[Message]] = {}
        self.counter = 0

    def __repr__(self):
        return f'<NodeState {self.id} holds={len(self.holds)}>'

    def next_trans_id(self) -> int:
        self.counter += 1
        if self.counter >= 1 << 32:
            raise InvalidParameter(f'node {self.id} ran out of transaction ids')
        return (self.id << 32) | self.counter

    def held(self) -> int:
        return sum(h.amount for h in self.holds.values())

    def handle(self, msg: Message) -> Outbound:
        if self.id not in msg.path:
            logger.warning(f'[node {self.id}] dropped {msg.msg_type.name} #{msg.trans_id}: not on path {msg.path}')
            return []
        handler = {
            MsgType.PROBE:       self._on_probe,
            MsgType.COMMIT:      self._on_commit,
            MsgType.COMMIT_NACK: self._on_nack,
            MsgType.CONFIRM:     self._on_confirm,
            MsgType.CONFIRM_ACK: self._on_confirm_ack,
            MsgType.REVERSE:     self._on_reverse,
        }.get(msg.msg_type, self._relay)
        return handler(msg)

    # helpers

    def _forward(self, msg: Message) -> Outbound:
        nxt = msg.next_hop(self.id)
        if nxt < 0:
            if msg.msg_type in REPLY_TYPES:
                self.replies.setdefault(msg.trans_id, []).append(msg)
            return []
        return [(nxt, msg)]

    def _relay(self, msg: Message) -> Outbound:
        return self._forward(msg)

    def _settle(self, trans_id: int, phase: HoldPhase) -> PendingHold:
        hold = self.holds.pop(trans_id)
        hold.phase = phase
        return hold

    # handlers

    def _on_probe(self, msg: Message) -> Outbound:
        nxt = msg.next_hop(self.id)
        if nxt < 0:
            return [(msg.prev_hop(self.id), msg.reply(MsgType.PROBE_ACK))]
        if not self.ledger.has_channel(self.id, nxt):
            logger.warning(f'[node {self.id}] probe #{msg.trans_id} dropped: no channel to {nxt}')
            return []
        fwd, rev = self.ledger.channels[(self.id, nxt)], self.ledger.channels[(nxt, self.id)]
        hop = HopCapacity(fwd.balance, rev.balance, round(fwd.fee.rate * PPM), round(rev.fee.rate * PPM))
        return [(nxt, Message(msg.trans_id, msg.msg_type, msg.path, msg.capacity + (hop,), msg.commit))]

    def _on_commit(self, msg: Message) -> Outbound:
        nxt = msg.next_hop(self.id)
        if nxt < 0:
            return [(msg.prev_hop(self.id), msg.reply(MsgType.COMMIT_ACK))]
        if msg.trans_id in self.holds:
            logger.warning(f'[node {self.id}] duplicate COMMIT #{msg.trans_id} ignored')
            return []

        if self.ledger.has_channel(self.id, nxt) and self.ledger.balance(self.id, nxt) >= msg.commit:
            self.ledger.debit(self.id, nxt, msg.commit)
            self.holds[msg.trans_id] = PendingHold(msg.trans_id, (self.id, nxt), msg.commit)
            return [(nxt, msg)]

        # send it straight back the way it came
        i = msg.path.index(self.id)
        if i == 0:
            self.replies.setdefault(msg.trans_id, []).append(msg.reply(MsgType.COMMIT_NACK, path=(nxt, self.id)))
            return []
        nack = msg.reply(MsgType.COMMIT_NACK, path=tuple(reversed(msg.path[:i + 1])))
        return [(msg.path[i - 1], nack)]

    def _on_nack(self, msg: Message) -> Outbound:
        if msg.path[0] != self.id and msg.trans_id in self.holds:
            hold = self._settle(msg.trans_id, HoldPhase.REVERSED)
            self.ledger.credit(*hold.edge, hold.amount)
        return self._forward(msg)

    def _on_confirm(self, msg: Message) -> Outbound:
        nxt = msg.next_hop(self.id)
        if nxt < 0:
            # upstream nodes move their held funds across the channel as the ack passes
            return [(msg.prev_hop(self.id), msg.reply(MsgType.CONFIRM_ACK))]
        if msg.trans_id not in self.holds:
            logger.warning(f'[node {self.id}] CONFIRM for unknown #{msg.trans_id} dropped')
            return []
        return [(nxt, msg)]

    def _on_confirm_ack(self, msg: Message) -> Outbound:
        prev = msg.prev_hop(self.id)
        if prev < 0:
            return self._forward(msg)
        hold = self.holds.get(msg.trans_id)
        if hold is None or hold.edge != (self.id, prev):
            logger.warning(f'[node {self.id}] CONFIRM_ACK for unknown #{msg.trans_id} dropped')
            return []
        # the held funds now sit on the other side of the channel
        self._settle(msg.trans_id, HoldPhase.CONFIRMED)
        self.ledger.credit(prev, self.id, hold.amount)
        return self._forward(msg)

    def _on_reverse(self, msg: Message) -> Outbound:
        nxt = msg.next_hop(self.id)
        if nxt < 0:
            return [(msg.prev_hop(self.id), msg.reply(MsgType.REVERSE_ACK))]
        hold = self.holds.get(msg.trans_id)
        if hold is None:
            logger.warning(f'[node {self.id}] REVERSE for unknown #{msg.trans_id} dropped')
            return []
        self._settle(msg.trans_id, HoldPhase.REVERSED)
        self.ledger.credit(*hold.edge, hold.amount)
        return [(nxt, msg)]
