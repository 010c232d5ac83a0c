# comparison routers: single shortest path, and spider's waterfilling over edge-disjoint paths

import logging
from typing import List, Sequence

from modules.pathfinder.bfs import bfs_feasible_shortest, edge_disjoint_shortest
from modules.workload.sampler import SizeClass
from modules.router.outcome import RoutingOutcome, Status, FailureReason, fees_of

logger = logging.getLogger(__name__)


def _outcome(router, payment, size_class, session, status, reason=None, delivered=0, paths_used=0, fee_paid=0) -> RoutingOutcome:
    return RoutingOutcome(payment.id, router, size_class, payment.demand, status, reason,
                          delivered=delivered, paths_used=paths_used, paths_probed=session.probes,
                          fee_paid=fee_paid, ticks=session.ticks)


def route_sp(payment, view, session, size_class: SizeClass = SizeClass.MICE) -> RoutingOutcome:
    ''' the whole demand on the fewest-hop path, no probing, no splitting '''
    path = bfs_feasible_shortest(view, None, payment.sender, payment.receiver)
    if path is None:
        session.finalize(abort=True)
        return _outcome('sp', payment, size_class, session, Status.FAILURE, FailureReason.NO_PATH)

    session.commit(path, payment.demand)
    if not session.finalize():
        return _outcome('sp', payment, size_class, session, Status.FAILURE, FailureReason.COMMIT_ABORTED)
    return _outcome('sp', payment, size_class, session, Status.SUCCESS, delivered=payment.demand,
                    paths_used=1, fee_paid=fees_of(view, [(path, payment.demand)]))


def waterfill(bottlenecks: Sequence[int], demand: int) -> List[int]:
    '''
    Unit waterfilling: every unit goes to the path with the most capacity left, lowest
    index on ties. Computed in closed form from the final water level.

    >>> waterfill([10, 4], 8)
    [7, 1]
    >>> waterfill([5, 5, 5], 4)
    [2, 1, 1]
    '''
    if demand <= 0: return [0] * len(bottlenecks)
    if sum(bottlenecks) < demand:
        raise ValueError(f'capacity {sum(bottlenecks)} below demand {demand}')

    def above(level):
        return sum(max(0, b - level) for b in bottlenecks)

    # smallest level L with above(L) <= demand
    lo, hi = 0, max(bottlenecks)
    while lo < hi:
        mid = (lo + hi) // 2
        if above(mid) <= demand: hi = mid
        else: lo = mid + 1
    alloc = [max(0, b - lo) for b in bottlenecks]
    rest = demand - sum(alloc)
    for i, b in enumerate(bottlenecks):
        if rest == 0: break
        if b >= lo and lo > 0:
            alloc[i] += 1
            rest -= 1
    return alloc


def route_spider(payment, view, session, n_paths: int = 4, size_class: SizeClass = SizeClass.MICE) -> RoutingOutcome:
    paths = edge_disjoint_shortest(view, payment.sender, payment.receiver, n_paths)
    if not paths:
        session.finalize(abort=True)
        return _outcome('spider', payment, size_class, session, Status.FAILURE, FailureReason.NO_PATH)

    bottlenecks = []
    for p in paths:
        hops = session.probe(p)
        bottlenecks.append(min(h.forward for h in hops) if hops else 0)
    if sum(bottlenecks) < payment.demand:
        session.finalize(abort=True)
        return _outcome('spider', payment, size_class, session, Status.FAILURE, FailureReason.INSUFFICIENT_CAPACITY)

    parts = [(p, r) for p, r in zip(paths, waterfill(bottlenecks, payment.demand)) if r > 0]
    session.commit_all(parts)
    if not session.finalize():
        return _outcome('spider', payment, size_class, session, Status.FAILURE, FailureReason.COMMIT_ABORTED)
    return _outcome('spider', payment, size_class, session, Status.SUCCESS, delivered=payment.demand,
                    paths_used=len(parts), fee_paid=fees_of(view, parts))
