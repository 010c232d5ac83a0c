from modules.feeopt.simplex import LPStatus, LPResult, linprog
from modules.feeopt.split import (
    SplitProblem, Allocation, SplitInfeasible, ConstraintViolation,
    solve_min_fee_split, sequential_fill, allocation_cost, lp_relaxation, violation,
)
