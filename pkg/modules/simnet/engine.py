# deterministic event loop carrying protocol messages between node instances

import heapq
import logging
from collections import Counter
from typing import Callable, Dict, List, NamedTuple, Optional

from modules.network.topology import Topology, NodeId
from modules.protocol.message import Message, MsgType
from modules.protocol.node import NodeState

logger = logging.getLogger(__name__)

HOP_LATENCY = 1


class Event(NamedTuple):
    tick: int
    seq: int
    dest: NodeId
    msg: Message


class SimClock:

    def __init__(self):
        self.tick = 0

    def advance(self, tick: int):
        if tick < self.tick:
            raise RuntimeError(f'clock would go back from {self.tick} to {tick}')
        self.tick = tick


class Engine:
    '''
    One NodeState per node over a shared ledger. Every network hop costs one tick;
    (tick, seq) ordering keeps delivery FIFO between any two nodes.
    '''

    def __init__(self, ledger: Topology):
        self.ledger = ledger
        self.nodes: Dict[NodeId, NodeState] = {u: NodeState(u, ledger) for u in sorted(ledger.nodes)}
        self.clock = SimClock()
        self.queue: List[Event] = []
        self.seq = 0
        self.delivered = 0
        self.owner: Dict[int, int] = {}                 # trans_id -> payment id
        self.msg_counts: Dict[int, Counter] = {}        # payment id -> Counter of MsgType

    def __len__(self):
        return len(self.queue)

    def register(self, trans_id: int, payment_id: int):
        self.owner[trans_id] = payment_id
        self.msg_counts.setdefault(payment_id, Counter())

    def send(self, dest: NodeId, msg: Message):
        heapq.heappush(self.queue, Event(self.clock.tick + HOP_LATENCY, self.seq, dest, msg))
        self.seq += 1

    def inject(self, msg: Message):
        ''' a message originated by path[0], handled there without a network hop '''
        self._dispatch(msg.path[0], msg)

    def _dispatch(self, dest: NodeId, msg: Message):
        node = self.nodes.get(dest)
        if node is None:
            logger.warning(f'[engine] {msg.msg_type.name} #{msg.trans_id} to unknown node {dest} dropped')
            return
        try:
            outbound = node.handle(msg)
        except Exception as e:
            logger.error(f'[engine] node {dest} failed on {msg.msg_type.name} #{msg.trans_id}: {e!r}')
            return
        for nxt, out in outbound:
            self.send(nxt, out)

    def deliver_next(self) -> Event:
        ev = heapq.heappop(self.queue)
        self.clock.advance(ev.tick)
        self.delivered += 1
        pid = self.owner.get(ev.msg.trans_id)
        if pid is not None:
            self.msg_counts[pid][ev.msg.msg_type] += 1
        self._dispatch(ev.dest, ev.msg)
        return ev

    def run_until(self, done: Callable[[], bool], deadline: Optional[int] = None) -> bool:
        ''' deliver until `done()` holds, the queue drains, or the next event is past `deadline` '''
        while not done():
            if not self.queue: return False
            if deadline is not None and self.queue[0].tick > deadline: return False
            self.deliver_next()
        return True

    def drain(self):
        while self.queue:
            self.deliver_next()

    def held(self) -> Dict[tuple, int]:
        ''' pending holds per undirected channel (u < v) '''
        held: Dict[tuple, int] = {}
        for node in self.nodes.values():
            for h in node.holds.values():
                key = tuple(sorted(h.edge))
                held[key] = held.get(key, 0) + h.amount
        return held

    def n_holds(self) -> int:
        return sum(len(n.holds) for n in self.nodes.values())

    def probe_messages(self, payment_id: int) -> int:
        c = self.msg_counts.get(payment_id, Counter())
        return c[MsgType.PROBE] + c[MsgType.PROBE_ACK]

    def messages(self, payment_id: int) -> int:
        return sum(self.msg_counts.get(payment_id, Counter()).values())
