'''
Flash routing: max-flow probing plus a fee-minimizing split for elephants,
routing-table paths with trial-and-error for mice.
'''

import math
import logging
from fractions import Fraction
from typing import List, Tuple

import numpy as np

from modules.network.topology import FeeSchedule
from modules.pathfinder.capacity import Path
from modules.pathfinder.edmonds_karp import InsufficientFlow, modified_edmonds_karp, crosses_itself, decompose_flow
from modules.feeopt.split import SplitProblem, SplitInfeasible, solve_min_fee_split, sequential_fill
from modules.protocol.sender import SubStatus
from modules.workload.sampler import SizeClass
from modules.router.outcome import RouterConfig, RoutingOutcome, Status, FailureReason, fees_of
from modules.router.table import RoutingTable

logger = logging.getLogger(__name__)


def _outcome(payment, size_class, session, status, reason=None, delivered=0, paths_used=0, fee_paid=0) -> RoutingOutcome:
    return RoutingOutcome(payment.id, 'flash', size_class, payment.demand, status, reason,
                          delivered=delivered, paths_used=paths_used, paths_probed=session.probes,
                          fee_paid=fee_paid, ticks=session.ticks)


def route_flash(payment, size_class: SizeClass, view, table: RoutingTable, session, config: RouterConfig, now: int = 0) -> RoutingOutcome:
    if size_class is SizeClass.MICE and config.m > 0:
        return route_mice(payment, view, table, session, config, now)
    return route_elephant(payment, view, session, config, size_class)


def route_elephant(payment, view, session, config: RouterConfig, size_class: SizeClass = SizeClass.ELEPHANT) -> RoutingOutcome:
    try:
        search = modified_edmonds_karp(view, payment, config.k, session)
    except InsufficientFlow as e:
        logger.debug(f'[elephant {payment.id}] {e}')
        session.finalize(abort=True)
        return _outcome(payment, size_class, session, Status.FAILURE, FailureReason.INSUFFICIENT_FLOW)

    # probed rates with the gossiped base fees, hops lost to a probe keep their gossiped rate
    fees = {}
    for p in search.paths:
        for e in zip(p[:-1], p[1:]):
            announced = view.fee(*e)
            fees[e] = FeeSchedule(announced.base, search.rates.get(e, announced.rate))
    problem = SplitProblem(search.paths, search.capacities, fees, payment.demand)
    try:
        alloc = solve_min_fee_split(problem) if config.fee_optimize else sequential_fill(problem)
    except SplitInfeasible as e:
        logger.debug(f'[elephant {payment.id}] {e}')
        session.finalize(abort=True)
        return _outcome(payment, size_class, session, Status.FAILURE, FailureReason.SPLIT_INFEASIBLE)

    parts = [(search.paths[i], r) for i, r in alloc.used()]
    # every hold debits its own forward balance, so paths crossing a channel both ways are netted first
    if crosses_itself(parts):
        parts = decompose_flow(parts, payment.sender, payment.receiver)
    session.commit_all(parts)
    if not session.finalize():
        return _outcome(payment, size_class, session, Status.FAILURE, FailureReason.COMMIT_ABORTED)
    return _outcome(payment, size_class, session, Status.SUCCESS, delivered=payment.demand,
                    paths_used=len(parts), fee_paid=parts_fee(fees, parts))


def parts_fee(fees, parts) -> int:
    total = sum((fees[e].charge(r) for p, r in parts for e in zip(p[:-1], p[1:])), Fraction(0))
    return math.ceil(total)


def route_mice(payment, view, table: RoutingTable, session, config: RouterConfig, now: int = 0) -> RoutingOutcome:
    '''
    Trial and error over the table's paths in a per-payment random order: the remaining
    demand goes unprobed first, a NACK triggers one probe and a partial commit of what the
    path holds. Accepted parts stay held until the loop ends, then all confirm or all reverse.
    '''
    s, t = payment.sender, payment.receiver
    entry = table.lookup(view, t, now)
    rng = np.random.default_rng([config.seed, payment.id])
    pending: List[Path] = [entry.paths[i] for i in rng.permutation(len(entry.paths))]
    remaining = payment.demand
    accepted: List[Tuple[Path, int]] = []
    replaced = 0

    while pending and remaining > 0:
        path = pending.pop(0)
        tid, status = session.commit(path, remaining)
        if status is SubStatus.ACKED:
            accepted.append((path, remaining))
            remaining = 0
            break
        if status is SubStatus.NACKED:
            session.txn.discard(tid)

        hops = session.probe(path)
        c = min(h.forward for h in hops) if hops else 0
        if c > 0:
            amount = min(remaining, c)
            tid, status = session.commit(path, amount)
            if status is SubStatus.ACKED:
                accepted.append((path, amount))
                remaining -= amount
            elif status is SubStatus.NACKED:
                session.txn.discard(tid)
        elif replaced < config.replace_budget:
            nxt = table.replace(view, t, path)
            if nxt is not None:
                pending.append(nxt)
                replaced += 1

    if remaining > 0:
        session.finalize(abort=True)
        return _outcome(payment, SizeClass.MICE, session, Status.FAILURE, FailureReason.PATHS_EXHAUSTED)
    if not session.finalize():
        return _outcome(payment, SizeClass.MICE, session, Status.FAILURE, FailureReason.COMMIT_ABORTED)
    return _outcome(payment, SizeClass.MICE, session, Status.SUCCESS, delivered=payment.demand,
                    paths_used=len(accepted), fee_paid=fees_of(view, accepted))
