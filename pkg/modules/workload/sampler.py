# payments routed by the simulator: sampling from traces and the elephant/mice split

import math
import logging
from enum import Enum
from fractions import Fraction
from typing import Dict, List, NamedTuple, Sequence

import numpy as np
import networkx as nx

from modules.network.topology import NodeId, InvalidParameter
from modules.workload.trace import TraceRecord, EmptyInput

logger = logging.getLogger(__name__)

MAX_RESAMPLE = 100

PAIRING_MAPPED = 'trace-pairs-mapped'
PAIRING_RANDOM = 'random-pairs'
PAIRINGS = [PAIRING_MAPPED, PAIRING_RANDOM]


class UnreachablePairError(RuntimeError):
    pass


class SizeClass(Enum):
    ELEPHANT = 'elephant'
    MICE = 'mice'


class Payment(NamedTuple):
    id: int
    sender: NodeId
    receiver: NodeId
    demand: int
    seq: int


def _as_fraction(q) -> Fraction:
    return Fraction(str(q)) if isinstance(q, float) else Fraction(q)


def percentile_threshold(volumes: Sequence[int], q) -> int:
    '''
    Nearest-rank percentile: the smallest v with at least ceil(q*N) volumes <= v.

    >>> percentile_threshold(range(1, 11), 0.9)
    9
    >>> percentile_threshold([5, 5, 5], 0.9)
    5
    '''
    xs = sorted(volumes)
    if not xs:
        raise EmptyInput('percentile of an empty set')
    q = _as_fraction(q)
    if not 0 < q < 1:
        raise InvalidParameter(f'q must be in (0, 1), got {q}')
    return xs[math.ceil(q * len(xs)) - 1]


def classify(payment: Payment, threshold: int) -> SizeClass:
    if threshold < 0:
        raise InvalidParameter(f'threshold must be >= 0, got {threshold}')
    return SizeClass.MICE if payment.demand <= threshold else SizeClass.ELEPHANT


def _components(topology) -> Dict[NodeId, int]:
    g = topology.to_networkx()
    if g.is_directed(): g = g.to_undirected()
    return {u: i for i, comp in enumerate(nx.connected_components(g)) for u in comp}


def _identity_map(records: Sequence[TraceRecord], nodes: List[NodeId], rng: np.random.Generator) -> Dict[str, NodeId]:
    '''
    seeded permutation of the account ids, wrapped around the node list: one-to-one while
    there are no more accounts than nodes, otherwise onto, with several accounts sharing a node
    '''
    ids = sorted({r.sender for r in records} | {r.receiver for r in records})
    order = rng.permutation(len(ids))
    return {ids[j]: nodes[i % len(nodes)] for i, j in enumerate(order)}


def sample_payments(records: Sequence[TraceRecord], n: int, topology, pairing: str = PAIRING_MAPPED,
                    seed: int = 0, max_resample: int = MAX_RESAMPLE) -> List[Payment]:
    '''
    `n` payments with volumes drawn (with replacement) from `records`.
      - trace-pairs-mapped: a whole record is drawn and its accounts are mapped onto nodes,
        so recurring pairs of the trace stay recurring (accounts outnumbering nodes share them)
      - random-pairs: endpoints uniform over nodes
    Draws whose endpoints collide or are disconnected are redrawn up to `max_resample` times.
    '''
    if pairing not in PAIRINGS:
        raise InvalidParameter(f'pairing must be one of {PAIRINGS}, got {pairing!r}')
    if n < 0:
        raise InvalidParameter(f'n must be >= 0, got {n}')
    if n == 0: return []
    if not records:
        raise EmptyInput('no trace records to sample from')
    nodes = sorted(topology.nodes)
    if len(nodes) < 2:
        raise InvalidParameter('topology needs at least 2 nodes')

    rng = np.random.default_rng(seed)
    comp = _components(topology)
    id_map = _identity_map(records, nodes, rng) if pairing == PAIRING_MAPPED else None

    payments = []
    for i in range(n):
        for _ in range(max_resample):
            rec = records[int(rng.integers(len(records)))]
            if id_map is not None:
                s, t = id_map[rec.sender], id_map[rec.receiver]
            else:
                s, t = (nodes[int(x)] for x in rng.choice(len(nodes), size=2, replace=False))
            if s != t and comp[s] == comp[t]: break
        else:
            raise UnreachablePairError(f'payment {i}: no connected pair after {max_resample} draws')
        payments.append(Payment(id=i + 1, sender=s, receiver=t, demand=rec.volume, seq=i))
    return payments
