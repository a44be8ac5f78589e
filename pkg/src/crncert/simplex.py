"""Two-phase simplex over the rationals with Bland's anti-cycling rule.

Solves ``min c^T x  s.t.  A x = b, x >= 0`` exactly.  Only what the cone
checks need: feasibility witnesses and small optimisations such as the
interior margin or the minimal quasipositivity shift.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"


@dataclass(frozen=True)
class LPResult:
    status: str
    x: tuple[Fraction, ...] | None = None
    value: Fraction | None = None

    @property
    def feasible(self) -> bool:
        return self.status != INFEASIBLE


class _Tableau:
    def __init__(self, A: Sequence[Sequence], b: Sequence):
        self.m = len(A)
        self.n = len(A[0]) if self.m else 0
        n, m = self.n, self.m
        self.rows: list[list[Fraction]] = []
        for i in range(m):
            row = [Fraction(v) for v in A[i]]
            rhs = Fraction(b[i])
            if rhs < 0:
                row = [-v for v in row]
                rhs = -rhs
            art = [Fraction(0)] * m
            art[i] = Fraction(1)
            self.rows.append(row + art + [rhs])
        self.basis = [n + i for i in range(m)]
        self.width = n + m

    def pivot(self, r: int, c: int) -> None:
        prow = self.rows[r]
        piv = prow[c]
        if piv != 1:
            prow = [v / piv for v in prow]
            self.rows[r] = prow
        nz = [k for k, v in enumerate(prow) if v != 0]
        for i, row in enumerate(self.rows):
            if i == r:
                continue
            f = row[c]
            if f != 0:
                for k in nz:
                    row[k] -= f * prow[k]
        f = self.cost[c]
        if f != 0:
            for k in nz:
                self.cost[k] -= f * prow[k]
        self.basis[r] = c

    def set_cost(self, c: Sequence) -> None:
        # reduced costs d_j = c_j - c_B^T B^{-1} A_j; last slot holds -objective
        cost = [Fraction(v) for v in c] + [Fraction(0)]
        for i, bj in enumerate(self.basis):
            cb = cost[bj]
            if cb != 0:
                row = self.rows[i]
                for k in range(len(cost)):
                    if row[k] != 0:
                        cost[k] -= cb * row[k]
        self.cost = cost

    def run(self, allowed: int) -> bool:
        """Iterate Bland pivots over columns ``< allowed``; False if unbounded."""
        while True:
            enter = next((j for j in range(allowed) if self.cost[j] < 0), None)
            if enter is None:
                return True
            best = None
            for i, row in enumerate(self.rows):
                a = row[enter]
                if a > 0:
                    ratio = row[-1] / a
                    key = (ratio, self.basis[i])
                    if best is None or key < best[0]:
                        best = (key, i)
            if best is None:
                return False
            self.pivot(best[1], enter)

    def solution(self) -> tuple[Fraction, ...]:
        x = [Fraction(0)] * self.n
        for i, bj in enumerate(self.basis):
            if bj < self.n:
                x[bj] = self.rows[i][-1]
        return tuple(x)


def solve_lp(A: Sequence[Sequence], b: Sequence, c: Sequence | None = None) -> LPResult:
    """Minimise ``c^T x`` over ``{x >= 0 : Ax = b}``; ``c=None`` means feasibility only."""
    if len(A) != len(b):
        raise ValueError("row count of A and length of b differ")
    tab = _Tableau(A, b)
    n, m = tab.n, tab.m
    if m == 0:
        x = tuple(Fraction(0) for _ in range(n))
        if c is None or all(Fraction(v) >= 0 for v in c):
            return LPResult(OPTIMAL, x, Fraction(0))
        return LPResult(UNBOUNDED)

    tab.set_cost([0] * n + [1] * m)
    tab.run(n + m)
    if tab.cost[-1] != 0:  # -(sum of artificials) at optimum
        return LPResult(INFEASIBLE)

    # drive remaining artificials out of the basis; drop redundant rows
    i = 0
    while i < len(tab.rows):
        if tab.basis[i] >= n:
            row = tab.rows[i]
            col = next((j for j in range(n) if row[j] != 0), None)
            if col is None:
                del tab.rows[i]
                del tab.basis[i]
                continue
            tab.pivot(i, col)
        i += 1

    if c is None:
        return LPResult(OPTIMAL, tab.solution(), Fraction(0))

    tab.set_cost(list(c) + [0] * m)
    if not tab.run(n):
        return LPResult(UNBOUNDED)
    x = tab.solution()
    value = sum((Fraction(ci) * xi for ci, xi in zip(c, x)), Fraction(0))
    return LPResult(OPTIMAL, x, value)


def find_nonneg_solution(A: Sequence[Sequence], b: Sequence) -> tuple[Fraction, ...] | None:
    """A vertex solution of ``Ax = b, x >= 0`` or ``None``."""
    res = solve_lp(A, b)
    return res.x if res.feasible else None
