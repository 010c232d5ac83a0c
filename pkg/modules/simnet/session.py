# the protocol handle a router gets for one payment

import logging
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

from modules.network.topology import PPM
from modules.pathfinder.capacity import HopProbe, Path
from modules.protocol.message import Message, MsgType
from modules.protocol.sender import SenderTxnState, SubStatus
from modules.simnet.engine import Engine

logger = logging.getLogger(__name__)

TIMEOUT_SLACK = 4


class PaymentSession:
    '''
    Probes and commits on behalf of `payment`'s sender; each call runs the event loop
    until the replies are back or the logical timeout of 2*hops + slack ticks passes.
    Probing satisfies the pathfinder's Prober interface.
    '''

    def __init__(self, engine: Engine, payment, slack: int = TIMEOUT_SLACK, overlap: bool = False):
        self.engine = engine
        self.payment = payment
        self.node = engine.nodes[payment.sender]
        self.slack = slack
        self.overlap = overlap
        self.txn = SenderTxnState(payment.id)
        self.start_tick = engine.clock.tick
        self.end_tick: Optional[int] = None
        self.probes = 0
        self.lost_probes = 0

    @property
    def ticks(self) -> int:
        end = self.engine.clock.tick if self.end_tick is None else self.end_tick
        return end - self.start_tick

    def _new_id(self) -> int:
        tid = self.node.next_trans_id()
        self.engine.register(tid, self.payment.id)
        return tid

    def _deadline(self, path: Path) -> int:
        return self.engine.clock.tick + 2 * (len(path) - 1) + self.slack

    def _replied(self, tid: int, kind: Sequence[MsgType]) -> Optional[Message]:
        for msg in self.node.replies.get(tid, []):
            if msg.msg_type in kind: return msg
        return None

    def probe(self, path: Path) -> Optional[List[HopProbe]]:
        path = tuple(path)
        self.probes += 1
        tid = self._new_id()
        self.engine.inject(Message(tid, MsgType.PROBE, path))
        self.engine.run_until(lambda: self._replied(tid, [MsgType.PROBE_ACK]) is not None, self._deadline(path))
        ack = self._replied(tid, [MsgType.PROBE_ACK])
        self.node.replies.pop(tid, None)
        if ack is None:
            self.lost_probes += 1
            logger.debug(f'[payment {self.payment.id}] probe on {path} timed out')
            return None
        return [HopProbe(h.forward, h.reverse, Fraction(h.forward_ppm, PPM), Fraction(h.reverse_ppm, PPM)) for h in ack.capacity]

    def commit_all(self, parts: Sequence[Tuple[Path, int]]) -> List[int]:
        ''' send every COMMIT at once and wait for all answers, returns the trans_ids '''
        tids = []
        for path, amount in parts:
            tid = self._new_id()
            self.engine.inject(self.txn.commit_message(tid, path, amount))
            tids.append(tid)
        deadline = max((self._deadline(p) for p, _ in parts), default=self.engine.clock.tick)
        kinds = [MsgType.COMMIT_ACK, MsgType.COMMIT_NACK]
        self.engine.run_until(lambda: all(self._replied(t, kinds) is not None for t in tids), deadline)
        for tid in tids:
            reply = self._replied(tid, kinds)
            self.node.replies.pop(tid, None)
            if reply is not None:
                self.txn.on_reply(reply)
            else:
                logger.warning(f'[payment {self.payment.id}] commit #{tid} timed out')
        return tids

    def commit(self, path: Path, amount: int) -> Tuple[int, SubStatus]:
        (tid,) = self.commit_all([(path, amount)])
        return tid, self.txn.subs[tid].status

    def finalize(self, abort: bool = False) -> bool:
        '''
        CONFIRM all sub-payments, or REVERSE the acked ones; True when the payment went through.
        Waits for the CONFIRM_ACK/REVERSE_ACK round unless the session overlaps with the next payment.
        '''
        timed_out = [s for s in self.txn.subs.values() if s.status is SubStatus.IN_FLIGHT]
        abort = abort or bool(timed_out)
        success = not abort and self.txn.all_acked()
        msgs = self.txn.finalize(abort)
        for msg in msgs:
            self.engine.inject(msg)
        self.end_tick = self.engine.clock.tick
        if self.overlap or not msgs:
            return success

        tids = {m.trans_id for m in msgs}
        kinds = [MsgType.CONFIRM_ACK, MsgType.REVERSE_ACK]
        deadline = max(self._deadline(m.path) for m in msgs)
        self.engine.run_until(lambda: all(self._replied(t, kinds) is not None for t in tids), deadline)
        for tid in tids:
            reply = self._replied(tid, kinds)
            self.node.replies.pop(tid, None)
            if reply is not None: self.txn.on_reply(reply)
        self.end_tick = self.engine.clock.tick
        return success
