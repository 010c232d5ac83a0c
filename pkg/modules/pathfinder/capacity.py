# probed capacity knowledge of one payment's path search

from fractions import Fraction
from typing import Dict, Iterator, List, NamedTuple, Optional, Protocol, Tuple

from modules.network.topology import NodeId, Edge, InvalidParameter

Path = Tuple[NodeId, ...]


def path_edges(path: Path) -> List[Edge]:
    '''
    >>> path_edges((1, 2, 6))
    [(1, 2), (2, 6)]
    '''
    return list(zip(path[:-1], path[1:]))


class HopProbe(NamedTuple):
    ''' what a probe learns about one hop u->v of the path '''
    forward: int                # balance u->v
    reverse: int                # balance v->u
    forward_rate: Fraction
    reverse_rate: Fraction


class Prober(Protocol):

    def probe(self, path: Path) -> Optional[List[HopProbe]]:
        ''' per-hop capacities in path order, None when the probe got lost '''
        ...


class CapacityMatrix:
    ''' sparse (u, v) -> amount, a missing entry is Unknown and passes as unbounded '''

    def __init__(self, entries: Dict[Edge, int] = None):
        self.entries: Dict[Edge, int] = {}
        for (u, v), c in (entries or {}).items():
            self[u, v] = c

    def __repr__(self):
        return f'CapacityMatrix({self.entries!r})'

    def __contains__(self, edge: Edge) -> bool:
        return edge in self.entries

    def __getitem__(self, edge: Edge) -> Optional[int]:
        return self.entries.get(edge)

    def __setitem__(self, edge: Edge, amount: int):
        if amount < 0:
            raise InvalidParameter(f'negative capacity {amount} on {edge}')
        self.entries[edge] = amount

    def __len__(self):
        return len(self.entries)

    def __iter__(self) -> Iterator[Edge]:
        return iter(self.entries)

    def items(self):
        return self.entries.items()

    def passable(self, u: NodeId, v: NodeId) -> bool:
        c = self.entries.get((u, v))
        return c is None or c > 0

    def copy(self) -> 'CapacityMatrix':
        m = CapacityMatrix()
        m.entries = dict(self.entries)
        return m


class TopologyProber:
    ''' reads the ledger directly, no messages involved '''

    def __init__(self, topology):
        self.topology = topology

    def probe(self, path: Path) -> Optional[List[HopProbe]]:
        tp = self.topology
        return [HopProbe(tp.balance(u, v), tp.balance(v, u), tp.fee(u, v).rate, tp.fee(v, u).rate)
                for u, v in path_edges(path)]
