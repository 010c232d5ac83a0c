import math
from dataclasses import dataclass, asdict
from enum import Enum
from fractions import Fraction
from typing import Optional

from modules.network.topology import InvalidParameter
from modules.pathfinder.capacity import Path, path_edges
from modules.workload.sampler import SizeClass


class Status(Enum):
    SUCCESS = 'success'
    FAILURE = 'failure'


class FailureReason(Enum):
    NO_PATH = 'no-path'
    INSUFFICIENT_FLOW = 'insufficient-flow'
    INSUFFICIENT_CAPACITY = 'insufficient-capacity'
    SPLIT_INFEASIBLE = 'split-infeasible'
    COMMIT_ABORTED = 'commit-aborted'
    PATHS_EXHAUSTED = 'paths-exhausted'


ROUTERS = ['flash', 'sp', 'spider']


@dataclass
class RouterConfig:
    k: int = 20                     # elephant path budget
    m: int = 4                      # mice paths per receiver, 0 routes everything as elephants
    mice_q: float = 0.9
    table_timeout: int = 2000       # arrivals an idle receiver stays in a routing table
    seed: int = 0
    spider_paths: int = 4
    fee_optimize: bool = True       # LP split, else sequential path filling
    replace_budget: Optional[int] = None    # extra Yen paths per mice payment, defaults to m

    def __post_init__(self):
        if self.k < 1:
            raise InvalidParameter(f'k must be >= 1, got {self.k}')
        if not 0 <= self.m <= self.k:
            raise InvalidParameter(f'm must be in [0, k={self.k}], got {self.m}')
        if not 0.0 <= self.mice_q <= 1.0:
            raise InvalidParameter(f'mice_q must be in [0, 1], got {self.mice_q}')
        if self.table_timeout < 1 or self.spider_paths < 1:
            raise InvalidParameter('table_timeout and spider_paths must be >= 1')
        if self.replace_budget is None:
            self.replace_budget = self.m


@dataclass
class RoutingOutcome:
    payment_id: int
    router: str
    size_class: SizeClass
    demand: int
    status: Status
    reason: Optional[FailureReason] = None
    delivered: int = 0
    paths_used: int = 0
    paths_probed: int = 0           # probe rounds
    probe_messages: int = 0         # PROBE + PROBE_ACK deliveries
    messages: int = 0               # every delivery of the payment
    fee_paid: int = 0
    ticks: int = 0

    @property
    def success(self) -> bool:
        return self.status is Status.SUCCESS

    def as_row(self) -> dict:
        row = asdict(self)
        row['size_class'] = self.size_class.value
        row['status'] = self.status.value
        row['reason'] = self.reason.value if self.reason else ''
        return row


def gossip_fee(view, path: Path, amount: int) -> Fraction:
    ''' fee of sending `amount` along `path` under the announced schedules '''
    return sum((view.fee(u, v).charge(amount) for u, v in path_edges(path)), Fraction(0))


def fees_of(view, parts) -> int:
    return math.ceil(sum((gossip_fee(view, p, r) for p, r in parts), Fraction(0)))
