# directed payment-channel topology with a per-direction balance ledger

import logging
from bisect import insort
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterator, List, Set, Tuple

import networkx as nx

logger = logging.getLogger(__name__)

NodeId = int
Edge = Tuple[NodeId, NodeId]

PPM = 1_000_000


class InvalidParameter(ValueError):
    pass


class InsufficientBalance(RuntimeError):

    def __init__(self, u: NodeId, v: NodeId, balance: int, amount: int):
        super().__init__(f'channel {u}->{v} holds {balance}, cannot move {amount}')
        self.edge = (u, v)
        self.balance = balance
        self.amount = amount


@dataclass(frozen=True)
class FeeSchedule:
    ''' f(r) = base * 1[r > 0] + rate * r '''

    base: int = 0
    rate: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, 'rate', Fraction(self.rate))
        if self.base < 0:
            raise InvalidParameter(f'fee base must be >= 0, got {self.base}')
        if not 0 <= self.rate < 1:
            raise InvalidParameter(f'fee rate must be in [0, 1), got {self.rate}')

    @classmethod
    def from_ppm(cls, rate_ppm: int, base: int = 0) -> 'FeeSchedule':
        return cls(base, Fraction(rate_ppm, PPM))

    @property
    def rate_ppm(self) -> int:
        ppm = self.rate * PPM
        if ppm.denominator != 1:
            raise InvalidParameter(f'fee rate {self.rate} is not a whole number of ppm')
        return int(ppm)

    def charge(self, amount) -> Fraction:
        if amount <= 0: return Fraction(0)
        return self.base + self.rate * amount


@dataclass
class ChannelDirState:
    balance: int = 0
    fee: FeeSchedule = field(default_factory=FeeSchedule)


class Topology:

    def __init__(self):
        self.nodes: Set[NodeId] = set()
        self.channels: Dict[Edge, ChannelDirState] = {}
        self._adj: Dict[NodeId, List[NodeId]] = {}

    def __repr__(self):
        return f'<Topology nodes={len(self.nodes)} channels={self.n_channels}>'

    @property
    def n_channels(self) -> int:
        return len(self.channels) // 2

    def add_node(self, u: NodeId):
        if u in self.nodes: return
        self.nodes.add(u)
        self._adj[u] = []

    def add_channel(self, u: NodeId, v: NodeId, balance_uv: int = 0, balance_vu: int = 0,
                    fee_uv: FeeSchedule = None, fee_vu: FeeSchedule = None):
        if u == v:
            raise InvalidParameter(f'self channel on node {u}')
        if (u, v) in self.channels:
            raise InvalidParameter(f'duplicate channel {u}-{v}')
        if balance_uv < 0 or balance_vu < 0:
            raise InvalidParameter(f'negative balance on channel {u}-{v}')

        self.add_node(u)
        self.add_node(v)
        self.channels[(u, v)] = ChannelDirState(int(balance_uv), fee_uv or FeeSchedule())
        self.channels[(v, u)] = ChannelDirState(int(balance_vu), fee_vu or FeeSchedule())
        insort(self._adj[u], v)
        insort(self._adj[v], u)

    def remove_channel(self, u: NodeId, v: NodeId):
        del self.channels[(u, v)]
        del self.channels[(v, u)]
        self._adj[u].remove(v)
        self._adj[v].remove(u)

    def remove_node(self, u: NodeId):
        for v in list(self._adj[u]):
            self.remove_channel(u, v)
        del self._adj[u]
        self.nodes.discard(u)

    def has_channel(self, u: NodeId, v: NodeId) -> bool:
        return (u, v) in self.channels

    def neighbors(self, u: NodeId) -> List[NodeId]:
        return self._adj.get(u, [])

    def degree(self, u: NodeId) -> int:
        return len(self._adj.get(u, []))

    def balance(self, u: NodeId, v: NodeId) -> int:
        return self.channels[(u, v)].balance

    def fee(self, u: NodeId, v: NodeId) -> FeeSchedule:
        return self.channels[(u, v)].fee

    def set_balance(self, u: NodeId, v: NodeId, balance: int):
        if balance < 0:
            raise InvalidParameter(f'negative balance on {u}->{v}')
        self.channels[(u, v)].balance = int(balance)

    def set_fee(self, u: NodeId, v: NodeId, fee: FeeSchedule):
        self.channels[(u, v)].fee = fee

    def channel_total(self, u: NodeId, v: NodeId) -> int:
        return self.channels[(u, v)].balance + self.channels[(v, u)].balance

    def undirected_channels(self) -> Iterator[Edge]:
        ''' each channel once as (u, v) with u < v, in sorted order '''
        for u in sorted(self._adj):
            for v in self._adj[u]:
                if u < v: yield u, v

    # ledger primitives; the protocol's holds are a debit, its confirms a credit

    def debit(self, u: NodeId, v: NodeId, amount: int):
        state = self.channels[(u, v)]
        if amount > state.balance:
            raise InsufficientBalance(u, v, state.balance, amount)
        state.balance -= amount

    def credit(self, u: NodeId, v: NodeId, amount: int):
        self.channels[(u, v)].balance += amount

    def copy(self) -> 'Topology':
        t = Topology()
        t.nodes = set(self.nodes)
        t.channels = {e: ChannelDirState(s.balance, s.fee) for e, s in self.channels.items()}
        t._adj = {u: list(vs) for u, vs in self._adj.items()}
        return t

    def to_networkx(self) -> nx.DiGraph:
        g = nx.DiGraph()
        g.add_nodes_from(sorted(self.nodes))
        for (u, v), state in self.channels.items():
            g.add_edge(u, v, capacity=state.balance)
        return g


def apply_payment_delta(topology: Topology, u: NodeId, v: NodeId, amount: int) -> Topology:
    ''' move `amount` across channel u->v, the total of the channel is kept '''
    if amount < 0:
        raise InvalidParameter(f'negative payment {amount}')
    if amount == 0: return topology

    topology.debit(u, v, amount)
    topology.credit(v, u, amount)
    return topology


def channel_totals(topology: Topology) -> Dict[Edge, int]:
    return {e: topology.channel_total(*e) for e in topology.undirected_channels()}


class LocalView:
    '''
    What a node knows of the network: connectivity and announced fees, never balances.
    One snapshot is shared by all nodes of a simulation.
    '''

    def __init__(self, topology: Topology):
        self.nodes = set(topology.nodes)
        self._adj = {u: list(vs) for u, vs in topology._adj.items()}
        self._fees = {e: s.fee for e, s in topology.channels.items()}

    def neighbors(self, u: NodeId) -> List[NodeId]:
        return self._adj.get(u, [])

    def has_channel(self, u: NodeId, v: NodeId) -> bool:
        return (u, v) in self._fees

    def fee(self, u: NodeId, v: NodeId) -> FeeSchedule:
        return self._fees[(u, v)]

    def remove_channel(self, u: NodeId, v: NodeId):
        self._adj[u].remove(v)
        self._adj[v].remove(u)
        del self._fees[(u, v)]
        del self._fees[(v, u)]

    def to_networkx(self) -> nx.Graph:
        g = nx.Graph()
        g.add_nodes_from(sorted(self.nodes))
        g.add_edges_from((u, v) for u in self._adj for v in self._adj[u] if u < v)
        return g
