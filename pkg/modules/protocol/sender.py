# sender side of an atomic multipath payment

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List

from modules.pathfinder.capacity import Path
from modules.protocol.message import Message, MsgType

logger = logging.getLogger(__name__)


class SubStatus(Enum):
    IN_FLIGHT = 'in-flight'
    ACKED = 'acked'
    NACKED = 'nacked'
    CONFIRMED = 'confirmed'
    REVERSED = 'reversed'


TERMINAL = {SubStatus.NACKED, SubStatus.CONFIRMED, SubStatus.REVERSED}


@dataclass
class SubPayment:
    trans_id: int
    path: Path
    amount: int
    status: SubStatus = SubStatus.IN_FLIGHT


@dataclass
class SenderTxnState:
    payment_id: int
    subs: Dict[int, SubPayment] = field(default_factory=dict)
    finalized: bool = False

    def commit_message(self, trans_id: int, path: Path, amount: int) -> Message:
        if self.finalized:
            raise RuntimeError(f'payment {self.payment_id} already finalized')
        self.subs[trans_id] = SubPayment(trans_id, tuple(path), amount)
        return Message(trans_id, MsgType.COMMIT, tuple(path), (), amount)

    def on_reply(self, msg: Message):
        sub = self.subs.get(msg.trans_id)
        if sub is None:
            logger.debug(f'[payment {self.payment_id}] reply {msg.msg_type.name} for unknown #{msg.trans_id}')
            return
        expect = {
            MsgType.COMMIT_ACK:  (SubStatus.IN_FLIGHT, SubStatus.ACKED),
            MsgType.COMMIT_NACK: (SubStatus.IN_FLIGHT, SubStatus.NACKED),
            MsgType.CONFIRM_ACK: (SubStatus.ACKED, SubStatus.CONFIRMED),
            MsgType.REVERSE_ACK: (SubStatus.ACKED, SubStatus.REVERSED),
        }.get(msg.msg_type)
        if expect is None or sub.status is not expect[0]:
            logger.debug(f'[payment {self.payment_id}] {msg.msg_type.name} #{msg.trans_id} ignored in state {sub.status.value}')
            return
        sub.status = expect[1]

    def discard(self, trans_id: int):
        ''' forget a nacked attempt that holds no funds, so it does not veto the confirm '''
        if self.subs[trans_id].status is not SubStatus.NACKED:
            raise RuntimeError(f'#{trans_id} is {self.subs[trans_id].status.value}, only nacked attempts can be discarded')
        del self.subs[trans_id]

    def with_status(self, status: SubStatus) -> List[SubPayment]:
        return [s for s in self.subs.values() if s.status is status]

    def all_acked(self) -> bool:
        return all(s.status is SubStatus.ACKED for s in self.subs.values())

    def resolved(self) -> bool:
        ''' every sub-payment answered its commit '''
        return all(s.status is not SubStatus.IN_FLIGHT for s in self.subs.values())

    def done(self) -> bool:
        return all(s.status in TERMINAL for s in self.subs.values())

    def delivered(self) -> int:
        return sum(s.amount for s in self.with_status(SubStatus.CONFIRMED))

    def finalize(self, abort: bool = False) -> List[Message]:
        '''
        CONFIRM every sub-payment when all of them were acked, otherwise REVERSE
        the acked ones; nacked ones released their holds on the way back already
        '''
        self.finalized = True
        acked = self.with_status(SubStatus.ACKED)
        kind = MsgType.CONFIRM if self.all_acked() and not abort else MsgType.REVERSE
        return [Message(s.trans_id, kind, s.path, (), s.amount) for s in acked]
