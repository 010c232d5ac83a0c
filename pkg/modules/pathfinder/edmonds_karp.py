# probe-driven max-flow search for elephant payments

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Sequence, Tuple

from modules.network.topology import NodeId, Edge, InvalidParameter
from modules.pathfinder.capacity import CapacityMatrix, Path, Prober, path_edges
from modules.pathfinder.bfs import bfs_feasible_shortest

logger = logging.getLogger(__name__)


@dataclass
class FlowSearch:
    paths: List[Path] = field(default_factory=list)
    bottlenecks: List[int] = field(default_factory=list)     # flow pushed along each path
    capacities: CapacityMatrix = field(default_factory=CapacityMatrix)
    residual: CapacityMatrix = field(default_factory=CapacityMatrix)
    rates: Dict[Edge, Fraction] = field(default_factory=dict)
    flow: int = 0
    iterations: int = 0
    probes: int = 0             # probe rounds, one per path
    lost_probes: int = 0


class InsufficientFlow(RuntimeError):

    def __init__(self, search: FlowSearch, demand: int):
        super().__init__(f'found flow {search.flow} < demand {demand} over {len(search.paths)} paths')
        self.search = search
        self.flow = search.flow
        self.probes = search.probes
        self.paths = search.paths
        self.demand = demand


def find_paths(view, s: NodeId, t: NodeId, k: int, prober: Prober) -> FlowSearch:
    '''
    At most k rounds of: shortest path on the residual, probe it, learn the capacities
    of first-seen hops (both directions), push the bottleneck and credit the reverse residual.
    '''
    if k < 1:
        raise InvalidParameter(f'k must be >= 1, got {k}')

    fs = FlowSearch()
    C, R = fs.capacities, fs.residual
    while fs.iterations < k:
        p = bfs_feasible_shortest(view, R, s, t)
        if p is None: break
        fs.iterations += 1
        edges = path_edges(p)

        fs.probes += 1
        hops = prober.probe(p)
        if hops is None:
            # lost probe: the unknown part of the path counts as empty
            fs.lost_probes += 1
            logger.debug(f'[find_paths] probe on {p} lost')
            for u, v in edges:
                for e in ((u, v), (v, u)):
                    if e not in C:
                        C[e] = 0
                        R[e] = 0
            continue

        for (u, v), hop in zip(edges, hops):
            if (u, v) not in C:
                C[u, v] = R[u, v] = hop.forward
                fs.rates[(u, v)] = hop.forward_rate
            if (v, u) not in C:
                C[v, u] = R[v, u] = hop.reverse
                fs.rates[(v, u)] = hop.reverse_rate

        c = min(R[e] for e in edges)
        for u, v in edges:
            R[u, v] = R[u, v] - c
            R[v, u] = R[v, u] + c
        fs.flow += c

        if p in fs.paths:
            fs.bottlenecks[fs.paths.index(p)] += c
        else:
            fs.paths.append(p)
            fs.bottlenecks.append(c)
        if c == 0:
            logger.debug(f'[find_paths] path {p} has zero effective capacity')

    return fs


def modified_edmonds_karp(view, payment, k: int, prober: Prober) -> FlowSearch:
    ''' find_paths from the payment's sender to its receiver, failing unless the flow covers the demand '''
    if payment.demand <= 0:
        raise InvalidParameter(f'demand must be positive, got {payment.demand}')

    fs = find_paths(view, payment.sender, payment.receiver, k, prober)
    if fs.flow < payment.demand:
        raise InsufficientFlow(fs, payment.demand)
    return fs


def crosses_itself(parts: Sequence[Tuple[Path, int]]) -> bool:
    ''' True when some channel is used in both directions by the given paths '''
    used = {e for p, _ in parts for e in path_edges(p)}
    return any((v, u) in used for u, v in used)


def decompose_flow(parts: Sequence[Tuple[Path, int]], s: NodeId, t: NodeId) -> List[Tuple[Path, int]]:
    '''
    Nets the per-channel flow of (path, amount) parts and walks it from s to t again,
    cancelling cycles on the way, so no returned path crosses a channel the other way.
    Amounts on every channel direction only shrink.

    >>> decompose_flow([((0, 1, 2, 3), 10), ((0, 4, 2, 1, 5, 3), 10)], 0, 3)
    [((0, 1, 5, 3), 10), ((0, 4, 2, 3), 10)]
    '''
    net: Dict[Edge, int] = {}
    for p, r in parts:
        for u, v in path_edges(p):
            net[u, v] = net.get((u, v), 0) + r
            net[v, u] = net.get((v, u), 0) - r
    succ: Dict[NodeId, List[NodeId]] = {}
    for u, v in sorted(e for e, f in net.items() if f > 0):
        succ.setdefault(u, []).append(v)

    def next_hop(u):
        return next((v for v in succ.get(u, ()) if net[u, v] > 0), None)

    def push(nodes, c):
        for u, v in path_edges(nodes):
            net[u, v] -= c
            net[v, u] += c

    out = []
    while next_hop(s) is not None:
        stack = [s]
        while stack[-1] != t:
            v = next_hop(stack[-1])
            if v is None:
                raise InvalidParameter(f'flow is not conserved at node {stack[-1]}')
            if v in stack:
                cycle = stack[stack.index(v):] + [v]
                push(cycle, min(net[e] for e in path_edges(cycle)))
                del stack[stack.index(v) + 1:]
                continue
            stack.append(v)
        path = tuple(stack)
        c = min(net[e] for e in path_edges(path))
        push(path, c)
        out.append((path, c))
    return out
