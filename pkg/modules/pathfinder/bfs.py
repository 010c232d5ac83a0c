from collections import deque
from typing import AbstractSet, Dict, List, Optional

from modules.network.topology import NodeId, Edge, InvalidParameter
from modules.pathfinder.capacity import CapacityMatrix, Path, path_edges


def bfs_feasible_shortest(view, residual: Optional[CapacityMatrix], s: NodeId, t: NodeId,
                          blocked: AbstractSet[Edge] = frozenset(), avoid: AbstractSet[NodeId] = frozenset()) -> Optional[Path]:
    '''
    Fewest-hop s->t path over edges whose residual is Unknown or positive.
    Neighbors are expanded in ascending id order and keep their first parent, so the
    result is the lexicographically smallest among the shortest paths.
    '''
    if s == t:
        raise InvalidParameter(f'source equals target ({s})')
    if s not in view.nodes or t not in view.nodes: return None

    parent: Dict[NodeId, NodeId] = {s: s}
    queue = deque([s])
    while queue:
        u = queue.popleft()
        for v in view.neighbors(u):
            if v in parent or v in avoid or (u, v) in blocked: continue
            if residual is not None and not residual.passable(u, v): continue
            parent[v] = u
            if v == t:
                hops = [t]
                while hops[-1] != s:
                    hops.append(parent[hops[-1]])
                return tuple(reversed(hops))
            queue.append(v)
    return None


def edge_disjoint_shortest(view, s: NodeId, t: NodeId, count: int) -> List[Path]:
    ''' successive shortest paths, each removing both directions of the channels it used '''
    if count < 1:
        raise InvalidParameter(f'count must be >= 1, got {count}')

    paths, blocked = [], set()
    while len(paths) < count:
        p = bfs_feasible_shortest(view, None, s, t, blocked)
        if p is None: break
        paths.append(p)
        for u, v in path_edges(p):
            blocked.add((u, v))
            blocked.add((v, u))
    return paths
