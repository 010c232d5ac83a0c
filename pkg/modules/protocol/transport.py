'''
Socket transport: the same frames over TCP, one NodeServer per node.
Delivery is reliable while the connections hold; a CONFIRM_ACK lost to a dropped
connection is not recovered, the holds it would have settled stay pending.
'''

import socket
import logging
import socketserver
from threading import Condition, Lock, Thread
from typing import Dict, List, Optional, Tuple

from modules.network.topology import NodeId
from modules.protocol.message import Message, FrameReader, encode, decode, frame_length, DecodeError, HEADER_SIZE
from modules.protocol.node import NodeState

logger = logging.getLogger(__name__)

Address = Tuple[str, int]


def _recv_exact(sock: socket.socket, n: int) -> bytes:
    buf = bytearray()
    while len(buf) < n:
        chunk = sock.recv(n - len(buf))
        if not chunk:
            raise ConnectionError('connection closed')
        buf.extend(chunk)
    return bytes(buf)


def send_message(sock: socket.socket, msg: Message):
    sock.sendall(encode(msg))


def recv_message(sock: socket.socket) -> Message:
    header = _recv_exact(sock, HEADER_SIZE)
    return decode(header + _recv_exact(sock, frame_length(header)))


class _FrameHandler(socketserver.BaseRequestHandler):

    def handle(self):
        reader = FrameReader()
        while True:
            data = self.request.recv(65536)
            if not data: break
            try:
                msgs = reader.feed(data)
            except DecodeError as e:
                logger.warning(f'[node {self.server.node_server.node.id}] bad frame from {self.client_address}: {e}')
                break
            for msg in msgs:
                self.server.node_server.deliver(msg)


class _TCPServer(socketserver.ThreadingTCPServer):
    daemon_threads = True
    allow_reuse_address = True


class NodeServer:
    '''
    Hosts one NodeState behind a TCP port. All servers of a process share `ledger_lock`,
    which serializes the handlers touching the channel ledger.
    '''

    def __init__(self, node: NodeState, host: str = '127.0.0.1', port: int = 0,
                 address_book: Dict[NodeId, Address] = None, ledger_lock: Lock = None):
        self.node = node
        self.address_book = address_book if address_book is not None else {}
        self.ledger_lock = ledger_lock or Lock()
        self.replied = Condition(self.ledger_lock)
        self._server = _TCPServer((host, port), _FrameHandler)
        self._server.node_server = self
        self._thread: Optional[Thread] = None
        self.address_book[node.id] = self.address

    @property
    def address(self) -> Address:
        return self._server.server_address[:2]

    def start(self) -> 'NodeServer':
        self._thread = Thread(target=self._server.serve_forever, name=f'node-{self.node.id}', daemon=True)
        self._thread.start()
        return self

    def stop(self):
        self._server.shutdown()
        self._server.server_close()

    def deliver(self, msg: Message):
        with self.replied:
            outbound = self.node.handle(msg)
            self.replied.notify_all()
        for dest, out in outbound:
            self.send(dest, out)

    def send(self, dest: NodeId, msg: Message):
        addr = self.address_book.get(dest)
        if addr is None:
            logger.warning(f'[node {self.node.id}] no address for node {dest}, {msg.msg_type.name} #{msg.trans_id} dropped')
            return
        try:
            with socket.create_connection(addr, timeout=5) as sock:
                send_message(sock, msg)
        except OSError as e:
            logger.warning(f'[node {self.node.id}] sending to {dest} at {addr} failed: {e}')

    def submit(self, msg: Message):
        ''' inject a message this node originates, it is handled locally first '''
        self.deliver(msg)

    def wait_replies(self, trans_id: int, count: int = 1, timeout: float = 5.0) -> List[Message]:
        with self.replied:
            self.replied.wait_for(lambda: len(self.node.replies.get(trans_id, [])) >= count, timeout)
            return list(self.node.replies.get(trans_id, []))
