'''
Source-routed protocol messages and their wire format.

Frame layout, all integers big-endian:
    [u32 length of the rest]
    [u64 trans_id] [u8 type]
    [u16 n] [n x u32 node id]                               path
    [u16 m] [m x (u64 fwd, u64 rev, u64 fwd_ppm, u64 rev_ppm)]   capacity
    [u64 commit]

Fee rates travel as whole parts per million. A finer rate, like 1/3 read from a topology
file, reaches the prober rounded to the nearest ppm; generated fees are drawn in ppm and stay exact.
'''

import struct
import logging
from enum import IntEnum
from dataclasses import dataclass
from typing import List, NamedTuple, Tuple

logger = logging.getLogger(__name__)

MAX_FRAME = 1 << 20
U16_MAX = (1 << 16) - 1
U32_MAX = (1 << 32) - 1
U64_MAX = (1 << 64) - 1

_LEN = struct.Struct('>I')
_HEAD = struct.Struct('>QB')
_COUNT = struct.Struct('>H')
_NODE = struct.Struct('>I')
_HOP = struct.Struct('>QQQQ')
_COMMIT = struct.Struct('>Q')


class EncodeError(ValueError):
    pass


class DecodeError(ValueError):
    pass


class MsgType(IntEnum):
    PROBE = 0
    PROBE_ACK = 1
    COMMIT = 2
    COMMIT_ACK = 3
    COMMIT_NACK = 4
    CONFIRM = 5
    CONFIRM_ACK = 6
    REVERSE = 7
    REVERSE_ACK = 8


PROBE_TYPES = {MsgType.PROBE, MsgType.PROBE_ACK}
# replies travel back to the sender, who is the last node of their path
REPLY_TYPES = {MsgType.PROBE_ACK, MsgType.COMMIT_ACK, MsgType.COMMIT_NACK, MsgType.CONFIRM_ACK, MsgType.REVERSE_ACK}


class HopCapacity(NamedTuple):
    forward: int
    reverse: int
    forward_ppm: int
    reverse_ppm: int


@dataclass(frozen=True)
class Message:
    trans_id: int
    msg_type: MsgType
    path: Tuple[int, ...]
    capacity: Tuple[HopCapacity, ...] = ()
    commit: int = 0

    def problems(self) -> List[str]:
        errs = []
        if not 0 <= self.trans_id <= U64_MAX:
            errs.append(f'trans_id {self.trans_id} out of u64 range')
        if len(self.path) < 2:
            errs.append(f'path needs at least 2 nodes, got {len(self.path)}')
        if len(self.path) > U16_MAX or len(self.capacity) > U16_MAX:
            errs.append('path or capacity list too long for a u16 count')
        if len(set(self.path)) != len(self.path):
            errs.append(f'path {self.path} repeats a node')
        if any(not 0 <= u <= U32_MAX for u in self.path):
            errs.append('node id out of u32 range')
        if len(self.capacity) > max(len(self.path) - 1, 0):
            errs.append(f'{len(self.capacity)} capacity entries for a {len(self.path)}-node path')
        if any(not 0 <= x <= U64_MAX for hop in self.capacity for x in hop):
            errs.append('capacity entry out of u64 range')
        if self.msg_type in PROBE_TYPES:
            if self.commit != 0: errs.append(f'{self.msg_type.name} carries commit {self.commit}')
        elif not 0 < self.commit <= U64_MAX:
            errs.append(f'{self.msg_type.name} needs a positive u64 commit, got {self.commit}')
        return errs

    def next_hop(self, node: int) -> int:
        ''' the node after `node` on this message's path, -1 when `node` is the last one '''
        i = self.path.index(node)
        return self.path[i + 1] if i + 1 < len(self.path) else -1

    def prev_hop(self, node: int) -> int:
        i = self.path.index(node)
        return self.path[i - 1] if i > 0 else -1

    def reply(self, msg_type: MsgType, path: Tuple[int, ...] = None, capacity=None, commit: int = None) -> 'Message':
        return Message(self.trans_id, msg_type,
                       tuple(reversed(self.path)) if path is None else tuple(path),
                       self.capacity if capacity is None else tuple(capacity),
                       self.commit if commit is None else commit)


def encode(msg: Message) -> bytes:
    if not isinstance(msg.msg_type, MsgType):
        raise EncodeError(f'unknown message type {msg.msg_type!r}')
    errs = msg.problems()
    if errs:
        raise EncodeError('; '.join(errs))

    body = [_HEAD.pack(msg.trans_id, msg.msg_type), _COUNT.pack(len(msg.path))]
    body.extend(_NODE.pack(u) for u in msg.path)
    body.append(_COUNT.pack(len(msg.capacity)))
    body.extend(_HOP.pack(*hop) for hop in msg.capacity)
    body.append(_COMMIT.pack(msg.commit))
    payload = b''.join(body)
    return _LEN.pack(len(payload)) + payload


def decode(frame: bytes) -> Message:
    frame = bytes(frame)
    if len(frame) < _LEN.size:
        raise DecodeError(f'truncated frame header ({len(frame)} bytes)')
    (length,) = _LEN.unpack_from(frame, 0)
    if length > MAX_FRAME:
        raise DecodeError(f'frame length {length} over the {MAX_FRAME} limit')
    if length != len(frame) - _LEN.size:
        raise DecodeError(f'frame length {length} does not match {len(frame) - _LEN.size} payload bytes')

    try:
        off = _LEN.size
        trans_id, raw_type = _HEAD.unpack_from(frame, off); off += _HEAD.size
        (n,) = _COUNT.unpack_from(frame, off); off += _COUNT.size
        path = struct.unpack_from(f'>{n}I', frame, off); off += n * _NODE.size
        (m,) = _COUNT.unpack_from(frame, off); off += _COUNT.size
        capacity = []
        for _ in range(m):
            capacity.append(HopCapacity(*_HOP.unpack_from(frame, off)))
            off += _HOP.size
        (commit,) = _COMMIT.unpack_from(frame, off); off += _COMMIT.size
    except struct.error as e:
        raise DecodeError(f'truncated frame: {e}') from e
    if off != len(frame):
        raise DecodeError(f'{len(frame) - off} trailing bytes')

    try:
        msg_type = MsgType(raw_type)
    except ValueError:
        raise DecodeError(f'unknown message type {raw_type}') from None
    msg = Message(trans_id, msg_type, tuple(path), tuple(capacity), commit)
    errs = msg.problems()
    if errs:
        raise DecodeError('; '.join(errs))
    return msg


HEADER_SIZE = _LEN.size


def frame_length(header: bytes) -> int:
    ''' payload length announced by a frame header, checked against MAX_FRAME '''
    (length,) = _LEN.unpack_from(header, 0)
    if length > MAX_FRAME:
        raise DecodeError(f'frame length {length} over the {MAX_FRAME} limit')
    return length


class FrameReader:
    ''' splits a byte stream into decoded messages, keeping partial frames between feeds '''

    def __init__(self):
        self.buffer = bytearray()

    def feed(self, data: bytes) -> List[Message]:
        self.buffer.extend(data)
        msgs = []
        while len(self.buffer) >= _LEN.size:
            end = HEADER_SIZE + frame_length(self.buffer)
            if len(self.buffer) < end: break
            msgs.append(decode(self.buffer[:end]))
            del self.buffer[:end]
        return msgs
