from modules.protocol.message import (
    MsgType, HopCapacity, Message, EncodeError, DecodeError, FrameReader,
    encode, decode, PROBE_TYPES, REPLY_TYPES,
)
from modules.protocol.node import NodeState, PendingHold, HoldPhase
from modules.protocol.sender import SenderTxnState, SubPayment, SubStatus
from modules.protocol.transport import NodeServer, send_message, recv_message
