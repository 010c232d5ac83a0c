# exact two-phase simplex over Fractions, Bland's rule keeps it from cycling
#   minimize c.x  s.t.  A_ub x <= b_ub,  A_eq x = b_eq,  x >= 0

import logging
from enum import Enum
from fractions import Fraction
from typing import List, NamedTuple, Optional, Sequence

logger = logging.getLogger(__name__)

Matrix = Sequence[Sequence]


class LPStatus(Enum):
    OPTIMAL = 'optimal'
    INFEASIBLE = 'infeasible'
    UNBOUNDED = 'unbounded'


class LPResult(NamedTuple):
    status: LPStatus
    x: Optional[List[Fraction]] = None
    objective: Optional[Fraction] = None


class _Tableau:

    def __init__(self, rows: List[List[Fraction]], rhs: List[Fraction], n_cols: int):
        self.T = [row + [b] for row, b in zip(rows, rhs)]
        self.n_cols = n_cols
        self.basis: List[int] = []

    def pivot(self, r: int, c: int):
        T = self.T
        piv = T[r][c]
        T[r] = [x / piv for x in T[r]]
        for i, row in enumerate(T):
            if i == r or row[c] == 0: continue
            f = row[c]
            T[i] = [x - f * y for x, y in zip(row, T[r])]
        self.basis[r] = c

    def reduced_costs(self, cost: List[Fraction]) -> List[Fraction]:
        d = list(cost)
        for i, b in enumerate(self.basis):
            cb = cost[b]
            if cb == 0: continue
            row = self.T[i]
            for j in range(self.n_cols):
                d[j] -= cb * row[j]
        return d

    def run(self, cost: List[Fraction], allowed: List[int]) -> LPStatus:
        while True:
            d = self.reduced_costs(cost)
            enter = next((j for j in allowed if d[j] < 0), None)     # Bland: lowest index
            if enter is None: return LPStatus.OPTIMAL
            rows = [i for i, row in enumerate(self.T) if row[enter] > 0]
            if not rows: return LPStatus.UNBOUNDED
            leave = min(rows, key=lambda i: (self.T[i][-1] / self.T[i][enter], self.basis[i]))
            self.pivot(leave, enter)

    def value(self, j: int) -> Fraction:
        for i, b in enumerate(self.basis):
            if b == j: return self.T[i][-1]
        return Fraction(0)


def linprog(c: Sequence, A_ub: Matrix = (), b_ub: Sequence = (), A_eq: Matrix = (), b_eq: Sequence = ()) -> LPResult:
    n = len(c)
    c = [Fraction(x) for x in c]
    m_ub, m_eq = len(A_ub), len(A_eq)
    m = m_ub + m_eq
    if len(b_ub) != m_ub or len(b_eq) != m_eq:
        raise ValueError('constraint matrix and bound vector lengths differ')
    if any(len(row) != n for row in list(A_ub) + list(A_eq)):
        raise ValueError(f'constraint rows must have {n} coefficients')

    # columns: x (n) | slacks (m_ub) | artificials (m)
    n_real = n + m_ub
    rows, rhs = [], []
    for i, (a, b) in enumerate(list(zip(A_ub, b_ub)) + list(zip(A_eq, b_eq))):
        row = [Fraction(x) for x in a] + [Fraction(0)] * m_ub
        if i < m_ub: row[n + i] = Fraction(1)
        b = Fraction(b)
        if b < 0:
            row, b = [-x for x in row], -b
        art = [Fraction(0)] * m
        art[i] = Fraction(1)
        rows.append(row + art)
        rhs.append(b)

    tab = _Tableau(rows, rhs, n_real + m)
    tab.basis = list(range(n_real, n_real + m))

    # phase 1: minimize the artificials
    cost1 = [Fraction(0)] * n_real + [Fraction(1)] * m
    tab.run(cost1, list(range(n_real + m)))
    infeasibility = sum((tab.value(j) for j in range(n_real, n_real + m)), Fraction(0))
    if infeasibility > 0:
        return LPResult(LPStatus.INFEASIBLE)

    # drive zero-level artificials out of the basis, drop the rows that are redundant
    for i in reversed(range(len(tab.basis))):
        if tab.basis[i] < n_real: continue
        j = next((j for j in range(n_real) if tab.T[i][j] != 0), None)
        if j is not None:
            tab.pivot(i, j)
        else:
            del tab.T[i]
            del tab.basis[i]

    cost2 = c + [Fraction(0)] * (m_ub + m)
    status = tab.run(cost2, list(range(n_real)))
    if status is not LPStatus.OPTIMAL:
        return LPResult(status)

    x = [tab.value(j) for j in range(n)]
    return LPResult(LPStatus.OPTIMAL, x, sum((ci * xi for ci, xi in zip(c, x)), Fraction(0)))
