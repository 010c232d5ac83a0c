# synthetic topologies, channel funding and fee assignment

import logging
from fractions import Fraction
from typing import Tuple

import numpy as np
import networkx as nx

from modules.network.topology import Topology, FeeSchedule, InvalidParameter, PPM

logger = logging.getLogger(__name__)

WS_MAX_TRIES = 100


def watts_strogatz(n: int, ring_degree: int, beta: float = 0.3, seed: int = 0, tries: int = WS_MAX_TRIES) -> Topology:
    '''
    Connected small-world graph, every undirected edge becomes a channel with both
    directions unfunded. A rewiring that disconnects the graph is retried with seed+1.
    '''
    if n < 3:
        raise InvalidParameter(f'n must be >= 3, got {n}')
    if ring_degree % 2 != 0 or not 2 <= ring_degree < n:
        raise InvalidParameter(f'ring_degree must be even and in [2, n), got {ring_degree}')
    if not 0.0 <= beta <= 1.0:
        raise InvalidParameter(f'beta must be in [0, 1], got {beta}')

    for attempt in range(tries):
        g = nx.watts_strogatz_graph(n, ring_degree, beta, seed=seed + attempt)
        if nx.is_connected(g): break
        logger.debug(f'[watts_strogatz] seed {seed + attempt} gave a disconnected graph, retrying')
    else:
        raise InvalidParameter(f'no connected graph for (n={n}, ring_degree={ring_degree}, beta={beta}) after {tries} seeds')

    topology = Topology()
    for u in range(n):
        topology.add_node(u)
    for u, v in sorted((min(e), max(e)) for e in g.edges()):
        topology.add_channel(u, v)
    return topology


def fund_uniform(topology: Topology, low: int, high: int, seed: int = 0) -> Topology:
    '''
    Draw each channel's total from [low, high) and split it evenly over both directions;
    the odd unit goes to the first direction (u->v with u < v).
    '''
    if not 0 <= low < high:
        raise InvalidParameter(f'need 0 <= low < high, got [{low}, {high})')

    rng = np.random.default_rng(seed)
    funded = topology.copy()
    for u, v in funded.undirected_channels():
        total = int(rng.integers(low, high))
        funded.set_balance(u, v, total - total // 2)
        funded.set_balance(v, u, total // 2)
    return funded


def scale_capacities(topology: Topology, factor) -> Topology:
    factor = Fraction(str(factor)) if isinstance(factor, float) else Fraction(factor)
    if factor <= 0:
        raise InvalidParameter(f'scale factor must be positive, got {factor}')

    scaled = topology.copy()
    for (u, v), state in scaled.channels.items():
        state.balance = int(state.balance * factor)     # floor, balances are >= 0
    return scaled


def assign_fees(topology: Topology, seed: int = 0, low_share: float = 0.9,
                low: Tuple[float, float] = (0.001, 0.01), high: Tuple[float, float] = (0.01, 0.10),
                base: int = 0) -> Topology:
    ''' per-direction proportional rates: `low_share` of them from `low`, the rest from `high` '''
    if not 0.0 <= low_share <= 1.0:
        raise InvalidParameter(f'low_share must be in [0, 1], got {low_share}')
    for lo, hi in (low, high):
        if not 0 <= lo < hi < 1:
            raise InvalidParameter(f'bad fee interval [{lo}, {hi})')

    rng = np.random.default_rng(seed)
    priced = topology.copy()
    for u, v in priced.undirected_channels():
        for edge in ((u, v), (v, u)):
            lo, hi = low if rng.random() < low_share else high
            ppm = int(rng.integers(round(lo * PPM), round(hi * PPM)))
            priced.set_fee(*edge, FeeSchedule.from_ppm(ppm, base))
    return priced
