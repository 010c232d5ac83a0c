# loopless k shortest paths by hop count, ties in lexicographic node order

import heapq
from typing import Iterator, List

from modules.network.topology import NodeId, InvalidParameter
from modules.pathfinder.capacity import Path
from modules.pathfinder.bfs import bfs_feasible_shortest


def iter_shortest_paths(view, s: NodeId, t: NodeId) -> Iterator[Path]:
    '''
    Yen's algorithm as a generator, paths come out ordered by (hops, node ids).
    Spur paths come from the lexicographic BFS, so every candidate is the smallest
    completion of its root and the candidate heap yields the global order.
    '''
    if s == t:
        raise InvalidParameter(f'source equals target ({s})')

    first = bfs_feasible_shortest(view, None, s, t)
    if first is None: return

    found: List[Path] = [first]
    candidates = []
    queued = {first}
    yield first

    while True:
        last = found[-1]
        for i in range(len(last) - 1):
            spur, root = last[i], last[:i + 1]
            blocked = {(p[i], p[i + 1]) for p in found if p[:i + 1] == root}
            spur_path = bfs_feasible_shortest(view, None, spur, t, blocked, avoid=set(root[:-1]))
            if spur_path is None: continue
            path = root[:-1] + spur_path
            if path not in queued:
                queued.add(path)
                heapq.heappush(candidates, (len(path), path))
        if not candidates: return
        _, path = heapq.heappop(candidates)
        found.append(path)
        yield path


def yen_k_shortest(view, s: NodeId, t: NodeId, m: int) -> List[Path]:
    if m < 1:
        raise InvalidParameter(f'm must be >= 1, got {m}')

    paths = []
    for p in iter_shortest_paths(view, s, t):
        paths.append(p)
        if len(paths) == m: break
    return paths
