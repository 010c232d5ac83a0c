from fractions import Fraction

import pytest

from modules.network import FeeSchedule, InvalidParameter
from modules.pathfinder import path_edges
from modules.feeopt import (
    LPStatus, linprog, SplitProblem, Allocation, SplitInfeasible, ConstraintViolation,
    solve_min_fee_split, sequential_fill, allocation_cost, violation,
)


def problem(paths, demand, caps=None, rates=None, default_cap=100):
    ''' every hop of every path in both directions, capacities and ppm rates by edge '''
    caps, rates = caps or {}, rates or {}
    capacities, fees = {}, {}
    for p in paths:
        for u, v in path_edges(p):
            for e in ((u, v), (v, u)):
                capacities[e] = caps.get(e, default_cap)
                fees[e] = FeeSchedule.from_ppm(rates.get(e, 0))
    return SplitProblem(paths, capacities, fees, demand)


class TestLinprog:

    def test_optimum(self):
        res = linprog([-1, -1], [[1, 1], [1, 0]], [4, 3])
        assert res.status is LPStatus.OPTIMAL
        assert res.objective == -4

    def test_equality(self):
        res = linprog([1, 2], [[1, 0], [0, 1]], [50, 50], [[1, 1]], [60])
        assert res.x == [50, 10]
        assert res.objective == Fraction(70)

    def test_infeasible(self):
        assert linprog([1], [[1]], [-1]).status is LPStatus.INFEASIBLE

    def test_unbounded(self):
        assert linprog([-1]).status is LPStatus.UNBOUNDED

    def test_shape_mismatch(self):
        with pytest.raises(ValueError):
            linprog([1, 1], [[1]], [1])


class TestSplit:

    def test_single_path_forced(self):
        p = problem([(0, 1, 2)], 60, caps={(0, 1): 100, (1, 2): 100})
        assert solve_min_fee_split(p).amounts == [60]

    def test_cheaper_path_first(self):
        p = problem([(0, 1, 3), (0, 2, 3)], 60, caps={(0, 1): 50, (0, 2): 50},
                    rates={(0, 1): 10000, (0, 2): 20000})
        assert solve_min_fee_split(p).amounts == [50, 10]

    def test_shared_channel_same_direction(self):
        paths = [(0, 1, 2, 5), (0, 3, 1, 2, 4, 5)]
        p = problem(paths, 60, caps={(1, 2): 40})
        with pytest.raises(SplitInfeasible):
            solve_min_fee_split(p)

    def test_shared_channel_opposite_direction(self):
        # the second path crosses 1-2 backwards, so its amount offsets the first one's
        paths = [(0, 1, 2, 5), (0, 3, 2, 1, 4, 5)]
        p = problem(paths, 60, caps={(1, 2): 40, (2, 1): 40})
        amounts = solve_min_fee_split(p).amounts
        assert sum(amounts) == 60
        assert violation(p, amounts) == 0

    def test_constraints_merge_rows(self):
        p = problem([(0, 1, 2)], 10, caps={(0, 1): 30, (1, 2): 20})
        A, b = p.constraints
        assert A == [[1]] and b == [20]

    def test_no_paths(self):
        with pytest.raises(SplitInfeasible):
            solve_min_fee_split(SplitProblem([], {}, {}, 5))

    def test_missing_capacity(self):
        with pytest.raises(InvalidParameter):
            SplitProblem([(0, 1)], {}, {(0, 1): FeeSchedule()}, 5)

    def test_integral(self):
        # zero rates leave the LP free to stop at any vertex
        paths = [(0, 1, 4), (0, 2, 4), (0, 3, 4)]
        p = problem(paths, 7, caps={(1, 4): 3, (2, 4): 3, (3, 4): 3})
        amounts = solve_min_fee_split(p).amounts
        assert all(isinstance(a, int) for a in amounts)
        assert sum(amounts) == 7 and violation(p, amounts) == 0

    def test_sequential_fill(self):
        p = problem([(0, 1, 3), (0, 2, 3)], 60, caps={(0, 1): 50, (0, 2): 50})
        assert sequential_fill(p).amounts == [50, 10]
        with pytest.raises(SplitInfeasible):
            sequential_fill(problem([(0, 1)], 60, caps={(0, 1): 50}))


class TestCost:

    def test_zero_fees(self):
        p = problem([(0, 1, 2)], 100)
        assert allocation_cost(p, Allocation([100])) == 0

    def test_two_hops(self):
        p = problem([(0, 1, 2)], 100, rates={(0, 1): 10000, (1, 2): 20000})
        assert allocation_cost(p, Allocation([100])) == 3

    def test_base_fee_only_on_used_paths(self):
        p = problem([(0, 1, 3), (0, 2, 3)], 10)
        p.fees[(0, 1)] = FeeSchedule(base=5)
        p.fees[(0, 2)] = FeeSchedule(base=7)
        assert allocation_cost(p, Allocation([10, 0])) == 5

    def test_rounds_up(self):
        p = problem([(0, 1)], 1, rates={(0, 1): 1000})
        assert allocation_cost(p, Allocation([1])) == 1

    def test_violation(self):
        p = problem([(0, 1)], 10, caps={(0, 1): 5})
        with pytest.raises(ConstraintViolation):
            allocation_cost(p, Allocation([10]))
        with pytest.raises(ConstraintViolation):
            allocation_cost(p, Allocation([5, 5]))
