"""Vertex matrix of the n-cube and the pairing of cube edges with coordinates.

Column indices are 1-based in every public function so the formulas read
the same as the binary-counting definition: column ``j`` encodes ``j - 1``
with row ``i`` holding bit ``i - 1``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .simplex import find_nonneg_solution

MAX_CUBE_DIM = 20
MAX_EXTREMALITY_DIM = 6


@dataclass(frozen=True)
class CubeMatrix:
    n: int
    entries: tuple[tuple[int, ...], ...]

    @property
    def ncols(self) -> int:
        return len(self.entries[0]) if self.entries else 0

    def column(self, j: int) -> tuple[int, ...]:
        """Column ``j`` (1-based)."""
        return tuple(row[j - 1] for row in self.entries)

    def tolist(self) -> list[list[int]]:
        return [list(r) for r in self.entries]


@dataclass(frozen=True)
class EdgePartner:
    j: int
    sign: int


def build_cube_matrix(n: int) -> CubeMatrix:
    if n < 1:
        raise ValueError("cube dimension must be >= 1")
    if n > MAX_CUBE_DIM:
        raise ValueError(f"cube dimension {n} exceeds limit {MAX_CUBE_DIM}")
    cols = 1 << n
    rows = tuple(tuple((j >> i) & 1 for j in range(cols)) for i in range(n))
    return CubeMatrix(n, rows)


def edge_partner(i: int, k: int, n: int) -> EdgePartner:
    """The column ``j(i, k)`` joined to column ``i`` by an edge parallel to ``e_k``."""
    if not 1 <= k <= n:
        raise ValueError(f"coordinate index {k} outside 1..{n}")
    if not 1 <= i <= (1 << n):
        raise ValueError(f"column index {i} outside 1..{1 << n}")
    half = 1 << (k - 1)
    if (i - 1) % (2 * half) >= half:
        return EdgePartner(i - half, -1)
    return EdgePartner(i + half, 1)


def are_adjacent(i: int, j: int) -> bool:
    """Adjacency of columns ``i < j`` by index arithmetic alone."""
    if i > j:
        i, j = j, i
    d = j - i
    if d <= 0 or d & (d - 1):
        return False
    return (i - 1) % (2 * d) < d


def verify_vertex_extremality(B: CubeMatrix) -> bool:
    """True iff no column is a convex combination of the other columns."""
    if B.n > MAX_EXTREMALITY_DIM:
        raise ValueError(f"extremality check limited to n <= {MAX_EXTREMALITY_DIM}")
    ncols = B.ncols
    for j in range(1, ncols + 1):
        others = [c for c in range(1, ncols + 1) if c != j]
        if not others:
            continue
        # rows of B restricted to others, plus the convexity row sum(p) = 1
        A = [[Fraction(B.entries[r][c - 1]) for c in others] for r in range(len(B.entries))]
        A.append([Fraction(1)] * len(others))
        b = [Fraction(v) for v in B.column(j)] + [Fraction(1)]
        if find_nonneg_solution(A, b) is not None:
            return False
    return True
