import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

from modules.network import Topology, FeeSchedule, LocalView
from modules.workload import Payment


def make_topology(channels, fees=None) -> Topology:
    ''' channels: (u, v, balance_uv, balance_vu); fees: (u, v) -> rate in ppm '''
    fees = fees or {}
    t = Topology()
    for u, v, buv, bvu in channels:
        t.add_channel(u, v, buv, bvu,
                      FeeSchedule.from_ppm(fees.get((u, v), 0)), FeeSchedule.from_ppm(fees.get((v, u), 0)))
    return t


def pay(sender, receiver, demand, id=1, seq=0) -> Payment:
    return Payment(id=id, sender=sender, receiver=receiver, demand=demand, seq=seq)


@pytest.fixture
def diamond() -> Topology:
    ''' 0 -> {1, 2} -> 3, two disjoint two-hop routes '''
    return make_topology([(0, 1, 50, 50), (1, 3, 40, 40), (0, 2, 30, 30), (2, 3, 60, 60)])


@pytest.fixture
def line4() -> Topology:
    return make_topology([(0, 1, 100, 100), (1, 2, 100, 100), (2, 3, 100, 100)])


@pytest.fixture
def view_of():
    return LocalView
