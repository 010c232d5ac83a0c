'''
Brute-force cross-checks for the three solvers on small seeded instances:
  - maxflow: probe-driven Edmonds-Karp against networkx's textbook Edmonds-Karp
  - lp:      min-fee split against an exhaustive integer grid
  - yen:     k shortest paths against enumeration of every simple path
'''

import math
import logging
from typing import Callable, Dict, List, NamedTuple, Optional, Tuple

import numpy as np
import networkx as nx
from networkx.algorithms.flow import edmonds_karp
from tqdm import tqdm

from modules.network.topology import PPM, FeeSchedule, Topology, LocalView
from modules.pathfinder.capacity import TopologyProber, path_edges
from modules.pathfinder.edmonds_karp import find_paths
from modules.pathfinder.yen import yen_k_shortest
from modules.feeopt.split import SplitProblem, SplitInfeasible, ConstraintViolation, solve_min_fee_split, allocation_cost
from modules.options import ConfigError

logger = logging.getLogger(__name__)


class Mismatch(NamedTuple):
    suite: str
    seed: int
    detail: str


# ----- max flow

def random_flow_instance(seed: int, max_nodes: int = 12, max_edges: int = 30, max_cap: int = 20) -> Tuple[Topology, int, int]:
    ''' random directed capacities laid over channels, the opposite direction of a lone arc is empty '''
    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, max_nodes + 1))
    pairs = [(u, v) for u in range(n) for v in range(n) if u != v]
    m = int(rng.integers(1, min(max_edges, len(pairs)) + 1))
    topology = Topology()
    for u in range(n):
        topology.add_node(u)
    for j in rng.choice(len(pairs), size=m, replace=False):
        u, v = pairs[int(j)]
        if not topology.has_channel(u, v):
            topology.add_channel(u, v)
        topology.set_balance(u, v, int(rng.integers(0, max_cap + 1)))
    return topology, 0, n - 1


def check_maxflow(seeds: int = 200, progress: bool = False) -> List[Mismatch]:
    mismatches = []
    for seed in tqdm(range(seeds), desc='[oracle maxflow]', disable=not progress):
        topology, s, t = random_flow_instance(seed)
        expected = nx.maximum_flow_value(topology.to_networkx(), s, t, flow_func=edmonds_karp)
        # augmentations of Edmonds-Karp are bounded by |V||E|/2, plus one wasted round per empty arc
        arcs = len(topology.channels)
        k = max(1, len(topology.nodes) * arcs // 2 + arcs)
        got = find_paths(LocalView(topology), s, t, k, TopologyProber(topology)).flow
        if got != expected:
            mismatches.append(Mismatch('maxflow', seed, f'flow {got} != {expected}'))
    return mismatches


# ----- min-fee split

def _fee_ppm(rng: np.random.Generator) -> int:
    lo, hi = (0.001, 0.01) if rng.random() < 0.9 else (0.01, 0.10)
    return int(rng.integers(round(lo * PPM), round(hi * PPM)))


def random_split_problem(seed: int, max_paths: int = 4, max_channels: int = 8, max_cap: int = 50,
                         max_demand: int = 60) -> SplitProblem:
    rng = np.random.default_rng(seed)
    while True:
        n = int(rng.integers(3, 7))
        e = int(rng.integers(n - 1, min(max_channels, n * (n - 1) // 2) + 1))
        g = nx.gnm_random_graph(n, e, seed=int(rng.integers(2 ** 31)))
        paths = sorted((tuple(p) for p in nx.all_simple_paths(g, 0, n - 1)), key=lambda p: (len(p), p))
        if paths: break

    picks = sorted(rng.choice(len(paths), size=min(max_paths, len(paths)), replace=False))
    paths = [paths[int(i)] for i in picks]
    capacities, fees = {}, {}
    for p in paths:
        for u, v in path_edges(p):
            for edge in ((u, v), (v, u)):
                if edge not in capacities:
                    capacities[edge] = int(rng.integers(0, max_cap + 1))
                    fees[edge] = FeeSchedule.from_ppm(_fee_ppm(rng))
    return SplitProblem(paths, capacities, fees, int(rng.integers(1, max_demand + 1)))


def brute_force_split(problem: SplitProblem) -> Optional[Tuple[int, List[int]]]:
    ''' cheapest integral split by exhaustive grid, (cost in atomic units, amounts) or None '''
    n, d = len(problem.paths), problem.demand
    if n == 1:
        grid = np.array([[d]], dtype=np.int64)
    else:
        axes = np.meshgrid(*[np.arange(d + 1, dtype=np.int64)] * (n - 1), indexing='ij')
        head = np.stack([a.ravel() for a in axes], axis=1)
        last = d - head.sum(axis=1)
        keep = last >= 0
        grid = np.column_stack([head[keep], last[keep]])

    A, b = problem.constraints
    if A:
        ok = (grid @ np.array(A, dtype=np.int64).T <= np.array(b, dtype=np.int64)).all(axis=1)
        grid = grid[ok]
    if len(grid) == 0: return None

    # rates are whole parts per million, so the cost is exact in ppm-units
    rate_ppm = np.array([sum(problem.fees[e].rate_ppm for e in path_edges(p)) for p in problem.paths], dtype=np.int64)
    cost = grid @ rate_ppm
    best = int(np.argmin(cost))
    return math.ceil(int(cost[best]) / PPM), [int(x) for x in grid[best]]


def check_lp(seeds: int = 100, progress: bool = False) -> List[Mismatch]:
    mismatches = []
    for seed in tqdm(range(seeds), desc='[oracle lp]', disable=not progress):
        problem = random_split_problem(seed)
        expected = brute_force_split(problem)
        try:
            got = allocation_cost(problem, solve_min_fee_split(problem))
        except SplitInfeasible:
            got = None
        except ConstraintViolation as e:
            mismatches.append(Mismatch('lp', seed, f'infeasible allocation: {e}'))
            continue

        if expected is None and got is None: continue
        if expected is None or got is None:
            mismatches.append(Mismatch('lp', seed, f'feasibility differs: solver {got}, grid {expected}'))
        elif abs(got - expected[0]) > 1:
            mismatches.append(Mismatch('lp', seed, f'cost {got} vs grid optimum {expected[0]} at {expected[1]}'))
    return mismatches


# ----- k shortest paths

def random_view(seed: int, max_nodes: int = 10) -> Tuple[LocalView, nx.Graph]:
    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, max_nodes + 1))
    e = int(rng.integers(n - 1, min(2 * n, n * (n - 1) // 2) + 1))
    g = nx.gnm_random_graph(n, e, seed=int(rng.integers(2 ** 31)))
    topology = Topology()
    for u in g.nodes:
        topology.add_node(u)
    for u, v in g.edges:
        topology.add_channel(u, v)
    return LocalView(topology), g


def brute_force_paths(g: nx.Graph, s: int, t: int, m: int) -> List[tuple]:
    return sorted((tuple(p) for p in nx.all_simple_paths(g, s, t)), key=lambda p: (len(p), p))[:m]


def check_yen(seeds: int = 100, progress: bool = False) -> List[Mismatch]:
    mismatches = []
    for seed in tqdm(range(seeds), desc='[oracle yen]', disable=not progress):
        view, g = random_view(seed)
        rng = np.random.default_rng([seed, 1])
        s, t = (int(x) for x in rng.choice(len(g), size=2, replace=False))
        m = int(rng.integers(1, 6))
        got = yen_k_shortest(view, s, t, m)
        expected = brute_force_paths(g, s, t, m)
        if got != expected:
            mismatches.append(Mismatch('yen', seed, f'{s}->{t} m={m}: {got} != {expected}'))
    return mismatches


SUITES: Dict[str, Tuple[Callable[..., List[Mismatch]], int]] = {
    'maxflow': (check_maxflow, 200),
    'lp':      (check_lp, 100),
    'yen':     (check_yen, 100),
}


def run_oracles(check: str = 'all', seeds: Optional[int] = None, progress: bool = False) -> Dict[str, List[Mismatch]]:
    if check != 'all' and check not in SUITES:
        raise ConfigError(f'unknown oracle suite {check!r}, expected one of {list(SUITES)} or all')
    if seeds is not None and seeds < 1:
        raise ConfigError(f'seeds must be >= 1, got {seeds}')

    results = {}
    for name, (fn, default_seeds) in SUITES.items():
        if check not in ('all', name): continue
        results[name] = fn(seeds or default_seeds, progress)
        for mm in results[name]:
            logger.warning(f'[run_oracles] {mm.suite} seed {mm.seed}: {mm.detail}')
    return results
