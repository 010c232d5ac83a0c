# fee-minimizing split of an elephant payment over its probed paths

import math
import logging
from dataclasses import dataclass, field
from functools import cached_property
from fractions import Fraction
from itertools import product
from typing import Dict, List, Sequence, Tuple

from modules.network.topology import Edge, FeeSchedule, InvalidParameter
from modules.pathfinder.capacity import Path, path_edges
from modules.feeopt.simplex import LPResult, LPStatus, linprog

logger = logging.getLogger(__name__)

EXHAUSTIVE_LIMIT = 12       # fractional variables tried floor/ceil exhaustively


class SplitInfeasible(RuntimeError):
    pass


class ConstraintViolation(ValueError):
    pass


@dataclass
class SplitProblem:
    paths: List[Path]
    capacities: Dict[Edge, int]         # probed C, any mapping (u, v) -> amount
    fees: Dict[Edge, FeeSchedule]
    demand: int

    def __post_init__(self):
        self.capacities = dict(self.capacities.items())
        if self.demand <= 0:
            raise InvalidParameter(f'demand must be positive, got {self.demand}')
        for p in self.paths:
            for e in path_edges(p):
                if self.capacities.get(e) is None or e not in self.fees:
                    raise InvalidParameter(f'hop {e} of path {p} has no probed capacity or fee')

    def path_rate(self, i: int) -> Fraction:
        return sum((self.fees[e].rate for e in path_edges(self.paths[i])), Fraction(0))

    @cached_property
    def constraints(self) -> Tuple[List[List[int]], List[int]]:
        '''
        one row per channel direction used forward by some path:
            sum_p r_p a(p, u, v) - sum_p r_p a(p, v, u) <= C(u, v)
        identical rows are merged keeping the tightest bound
        '''
        uses = [set(path_edges(p)) for p in self.paths]
        forward = sorted(set().union(*uses)) if uses else []
        merged: Dict[Tuple[int, ...], int] = {}
        for u, v in forward:
            row = tuple(int((u, v) in use) - int((v, u) in use) for use in uses)
            cap = self.capacities[(u, v)]
            merged[row] = min(cap, merged.get(row, cap))
        rows = sorted(merged)
        return [list(r) for r in rows], [merged[r] for r in rows]


@dataclass
class Allocation:
    amounts: List[int] = field(default_factory=list)

    def used(self) -> List[Tuple[int, int]]:
        ''' (path index, amount) of the paths carrying something '''
        return [(i, r) for i, r in enumerate(self.amounts) if r > 0]


def violation(problem: SplitProblem, amounts: Sequence) -> Fraction:
    ''' total excess over the demand equality and capacity rows, 0 iff feasible '''
    A, b = problem.constraints
    excess = sum((max(Fraction(0), sum(a * r for a, r in zip(row, amounts)) - cap) for row, cap in zip(A, b)), Fraction(0))
    excess += sum(max(0, -r) for r in amounts)
    return excess + abs(sum(amounts) - problem.demand)


def lp_relaxation(problem: SplitProblem) -> LPResult:
    n = len(problem.paths)
    if n == 0: return LPResult(LPStatus.INFEASIBLE)
    A, b = problem.constraints
    c = [problem.path_rate(i) for i in range(n)]
    return linprog(c, A, b, [[1] * n], [problem.demand])


def _integerize(problem: SplitProblem, x: List[Fraction]) -> List[int]:
    n = len(x)
    rates = [problem.path_rate(i) for i in range(n)]
    amounts = [math.floor(v) for v in x]
    residue = problem.demand - sum(amounts)

    # unit-greedy: each unit to the path that keeps the excess lowest, then the cheapest
    for _ in range(residue):
        def score(i):
            trial = list(amounts)
            trial[i] += 1
            return violation(problem, trial), rates[i], i
        amounts[min(range(n), key=score)] += 1
    if violation(problem, amounts) == 0: return amounts

    frac = [i for i, v in enumerate(x) if v.denominator != 1]
    if len(frac) > EXHAUSTIVE_LIMIT:
        raise SplitInfeasible(f'no integral split near the optimum ({len(frac)} fractional paths)')
    best = None
    for ups in product((0, 1), repeat=len(frac)):
        trial = [math.floor(v) for v in x]
        for i, up in zip(frac, ups):
            trial[i] += up
        if violation(problem, trial) != 0: continue
        key = (sum(r * a for r, a in zip(rates, trial)), trial)
        if best is None or key < best: best = key
    if best is None:
        raise SplitInfeasible('no integral split near the optimum')
    return best[1]


def solve_min_fee_split(problem: SplitProblem) -> Allocation:
    '''
    Optimal split of the demand over the path set, proportional fees only;
    base fees are added by allocation_cost for the paths that end up used.
    '''
    lp = lp_relaxation(problem)
    if lp.status is not LPStatus.OPTIMAL:
        raise SplitInfeasible(f'split LP is {lp.status.value} for demand {problem.demand} over {len(problem.paths)} paths')
    amounts = _integerize(problem, lp.x)
    logger.debug(f'[solve_min_fee_split] lp objective {float(lp.objective):.4f}, split {amounts}')
    return Allocation(amounts)


def sequential_fill(problem: SplitProblem) -> Allocation:
    ''' fee-agnostic baseline: paths in discovery order, each filled up to its remaining slack '''
    net: Dict[Edge, int] = {}
    remaining = problem.demand
    amounts = []
    for p in problem.paths:
        edges = path_edges(p)
        slack = min(problem.capacities[(u, v)] - net.get((u, v), 0) + net.get((v, u), 0) for u, v in edges)
        r = max(0, min(remaining, slack))
        for e in edges:
            net[e] = net.get(e, 0) + r
        amounts.append(r)
        remaining -= r
    if remaining > 0:
        raise SplitInfeasible(f'paths hold {problem.demand - remaining} of demand {problem.demand}')
    return Allocation(amounts)


def allocation_cost(problem: SplitProblem, allocation: Allocation) -> int:
    if len(allocation.amounts) != len(problem.paths):
        raise ConstraintViolation(f'{len(allocation.amounts)} amounts for {len(problem.paths)} paths')
    if violation(problem, allocation.amounts) != 0:
        raise ConstraintViolation(f'allocation {allocation.amounts} breaks demand or capacity constraints')

    total = Fraction(0)
    for i, r in allocation.used():
        for e in path_edges(problem.paths[i]):
            total += problem.fees[e].charge(r)
    return math.ceil(total)
