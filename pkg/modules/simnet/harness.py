# runs a workload payment by payment through one router

import logging
from typing import Dict, List, Optional, Sequence

from tqdm import tqdm

from modules.network.topology import Topology, LocalView, NodeId, InvalidParameter, channel_totals
from modules.workload.sampler import Payment, SizeClass, classify, percentile_threshold
from modules.router.outcome import ROUTERS, RouterConfig, RoutingOutcome
from modules.router.table import RoutingTable, refresh_table
from modules.router.flash import route_flash
from modules.router.baselines import route_sp, route_spider
from modules.simnet.engine import Engine
from modules.simnet.session import PaymentSession, TIMEOUT_SLACK
from modules.runtime import state

logger = logging.getLogger(__name__)


class ConservationError(RuntimeError):
    pass


def mice_threshold(payments: Sequence[Payment], q: float) -> int:
    ''' q <= 0 makes every payment an elephant, q >= 1 every payment a mouse '''
    demands = [p.demand for p in payments]
    if not demands or q <= 0: return 0
    if q >= 1: return max(demands)
    return percentile_threshold(demands, q)


def check_conservation(engine: Engine, totals: Dict[tuple, int], quiescent: bool):
    held = engine.held()
    for (u, v), total in totals.items():
        now = engine.ledger.channel_total(u, v) + held.get((u, v), 0)
        if now != total:
            raise ConservationError(f'channel {u}-{v} holds {now}, started with {total}')
    if quiescent and (engine.queue or engine.n_holds()):
        raise ConservationError(f'not quiescent: {len(engine.queue)} queued messages, {engine.n_holds()} holds')


class Simulation:
    '''
    Owns the ledger (mutated in place), the event engine, the connectivity view every
    node shares, and the per-sender routing tables.
    '''

    def __init__(self, topology: Topology, router: str = 'flash', config: RouterConfig = None,
                 overlap: bool = False, slack: int = TIMEOUT_SLACK, check: bool = True):
        if router not in ROUTERS:
            raise InvalidParameter(f'router must be one of {ROUTERS}, got {router!r}')
        self.topology = topology
        self.router = router
        self.config = config or RouterConfig()
        self.overlap = overlap
        self.slack = slack
        self.check = check
        self.engine = Engine(topology)
        self.view = LocalView(topology)
        self.tables: Dict[NodeId, RoutingTable] = {}
        self.totals = channel_totals(topology)

    def table(self, node: NodeId) -> RoutingTable:
        if node not in self.tables:
            self.tables[node] = RoutingTable(node, self.config.m, self.config.table_timeout)
        return self.tables[node]

    def route(self, payment: Payment, size_class: SizeClass) -> RoutingOutcome:
        session = PaymentSession(self.engine, payment, self.slack, self.overlap)
        if self.router == 'flash':
            table = self.table(payment.sender) if self.config.m > 0 else None
            return route_flash(payment, size_class, self.view, table, session, self.config, now=payment.seq)
        if self.router == 'sp':
            return route_sp(payment, self.view, session, size_class)
        return route_spider(payment, self.view, session, self.config.spider_paths, size_class)

    def run(self, payments: Sequence[Payment], threshold: Optional[int] = None, progress: bool = False) -> List[RoutingOutcome]:
        if threshold is None:
            threshold = mice_threshold(payments, self.config.mice_q)
        outcomes = []
        for i, payment in enumerate(tqdm(payments, desc=f'[{self.router}]', disable=not progress, leave=False)):
            if state.interrupted: break
            if self.check:
                check_conservation(self.engine, self.totals, quiescent=not self.overlap)
            outcomes.append(self.route(payment, classify(payment, threshold)))
            if (i + 1) % self.config.table_timeout == 0:
                for table in self.tables.values():
                    refresh_table(table, self.view, payment.seq)

        self.engine.drain()
        for node in self.engine.nodes.values():
            node.replies.clear()
        if self.check:
            check_conservation(self.engine, self.totals, quiescent=True)

        # late messages of overlapped payments land after their outcome was made
        for o in outcomes:
            o.probe_messages = self.engine.probe_messages(o.payment_id)
            o.messages = self.engine.messages(o.payment_id)
        return outcomes


def run_workload(topology: Topology, payments: Sequence[Payment], router: str = 'flash', config: RouterConfig = None,
                 overlap: bool = False, progress: bool = False) -> List[RoutingOutcome]:
    ''' route `payments` in arrival order; `topology` ends holding the final balances '''
    for a, b in zip(payments, payments[1:]):
        if b.seq < a.seq:
            raise InvalidParameter(f'payments out of order at seq {b.seq}')
    return Simulation(topology, router, config, overlap).run(payments, progress=progress)
