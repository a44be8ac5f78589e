"""Cubic cones ``K = {Lambda z : z >= 0}`` with ``Lambda = c 1^T + Gamma B``.

Everything here is exact: vectors and matrices hold ``Fraction`` entries and
every feasibility question goes through the rational simplex.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple, Sequence

from . import linalg
from .cube import build_cube_matrix, edge_partner
from .kinetics import qualitative_class_member
from .network import StoichiometricMatrix
from .simplex import INFEASIBLE, OPTIMAL, UNBOUNDED, find_nonneg_solution, solve_lp

MAX_IRREDUCIBLE_DIM = 5


class ConeError(ValueError):
    """Inputs for which a cubic cone or a witness cannot be formed."""


def _gamma_rows(gamma) -> list[list[Fraction]]:
    if isinstance(gamma, StoichiometricMatrix):
        return gamma.as_fractions()
    return linalg.to_fractions(gamma)


@dataclass(frozen=True)
class CubicCone:
    gamma: tuple[tuple[Fraction, ...], ...]
    c: tuple[Fraction, ...]
    lam: tuple[tuple[Fraction, ...], ...]
    r: tuple[int, ...]

    @property
    def m(self) -> int:
        return len(self.gamma)

    @property
    def n(self) -> int:
        return len(self.gamma[0])

    @property
    def ngen(self) -> int:
        return len(self.lam[0])

    def generator(self, i: int) -> tuple[Fraction, ...]:
        """Column ``i`` of Lambda, 1-based."""
        return tuple(row[i - 1] for row in self.lam)

    def generators(self) -> list[tuple[Fraction, ...]]:
        return [self.generator(i) for i in range(1, self.ngen + 1)]

    def to_dict(self) -> dict:
        return {
            "gamma": [[linalg.frac_str(v) for v in row] for row in self.gamma],
            "c": [linalg.frac_str(v) for v in self.c],
            "lambda": [[linalg.frac_str(v) for v in row] for row in self.lam],
            "r": [linalg.frac_str(v) for v in self.r],
        }


@dataclass(frozen=True)
class RightInverseWitness:
    P: tuple[tuple[Fraction, ...], ...]

    def verify(self, lam: Sequence[Sequence]) -> bool:
        return verify_right_inverse(lam, self.P)


@dataclass(frozen=True)
class DiagonalRescaleWitness:
    diagonal: tuple[Fraction, ...]

    def verify(self, lam: Sequence[Sequence]) -> bool:
        return verify_diagonal_rescale(lam, self.diagonal)


@dataclass(frozen=True)
class QuasipositivityWitness:
    alpha_ik: tuple[tuple[Fraction, ...], ...]
    alpha_i: tuple[Fraction, ...]
    alpha: Fraction


class InteriorResult(NamedTuple):
    inside: bool
    margin: Fraction


class QuasipositivityResult(NamedTuple):
    quasipositive: bool
    alpha: Fraction | None


def lambda_matrix(gamma, c: Sequence) -> list[list[Fraction]]:
    G = _gamma_rows(gamma)
    n = len(G[0])
    B = build_cube_matrix(n)
    c = [Fraction(v) for v in c]
    GB = linalg.matmul(G, B.entries)
    return [[c[i] + v for v in GB[i]] for i in range(len(G))]


def kernel_covector(gamma, c: Sequence) -> tuple[int, ...]:
    """Primitive integer generator of ``ker Gamma^T`` signed so that ``r.c > 0``."""
    G = _gamma_rows(gamma)
    basis = linalg.nullspace(linalg.transpose(G), ncols=len(G))
    if len(basis) != 1:
        raise ConeError(f"ker Gamma^T has dimension {len(basis)}, expected 1")
    return _signed_covector(basis, c)


def _signed_covector(basis, c) -> tuple[int, ...]:
    c = [Fraction(v) for v in c]
    for v in basis:
        s = sum((a * b for a, b in zip(v, c)), Fraction(0))
        if s != 0:
            r = linalg.primitive_integer(v)
            return tuple(r) if s > 0 else tuple(-x for x in r)
    raise ConeError("c lies in Im Gamma: no covector with r.c > 0")


def build_cubic_cone(gamma, c: Sequence) -> CubicCone:
    G = _gamma_rows(gamma)
    m, n = len(G), len(G[0]) if G else 0
    if len(c) != m:
        raise ConeError("length of c does not match the row count of Gamma")
    if not m > n:
        raise ConeError(f"need more rows than columns, got {m} x {n}")
    if linalg.rank(G) != n:
        raise ConeError("Gamma is rank deficient")
    if linalg.solve(G, c) is not None:
        raise ConeError("c lies in Im Gamma")
    basis = linalg.nullspace(linalg.transpose(G), ncols=m)
    r = _signed_covector(basis, c)
    lam = lambda_matrix(G, c)
    return CubicCone(
        tuple(tuple(row) for row in G),
        tuple(Fraction(v) for v in c),
        tuple(tuple(row) for row in lam),
        r,
    )


def verify_right_inverse(lam: Sequence[Sequence], P: Sequence[Sequence]) -> bool:
    if any(Fraction(v) < 0 for row in P for v in row):
        return False
    if len(P) != len(lam[0]):
        return False
    return linalg.matmul(linalg.to_fractions(lam), linalg.to_fractions(P)) == linalg.identity(len(lam))


def verify_diagonal_rescale(lam: Sequence[Sequence], diagonal: Sequence) -> bool:
    if len(diagonal) != len(lam) or any(Fraction(d) <= 0 for d in diagonal):
        return False
    return all(Fraction(d) * Fraction(v) in (-1, 0, 1) for d, row in zip(diagonal, lam) for v in row)


def find_nonneg_right_inverse(lam: Sequence[Sequence]) -> RightInverseWitness | None:
    """Solve ``Lambda z = e_i, z >= 0`` for each ``i``; ``None`` if any is infeasible."""
    L = linalg.to_fractions(lam)
    m = len(L)
    cols = []
    for i in range(m):
        e = [Fraction(int(k == i)) for k in range(m)]
        z = find_nonneg_solution(L, e)
        if z is None:
            return None
        cols.append(z)
    P = tuple(tuple(row) for row in linalg.transpose(cols))
    assert verify_right_inverse(L, P)
    return RightInverseWitness(P)


def find_diagonal_rescale(lam: Sequence[Sequence]) -> DiagonalRescaleWitness | None:
    """Positive ``D`` with ``D Lambda`` a (-1,0,1)-matrix, if one exists."""
    diag = []
    for row in lam:
        mags = {abs(Fraction(v)) for v in row if v != 0}
        if len(mags) > 1:
            return None
        diag.append(1 / mags.pop() if mags else Fraction(1))
    return DiagonalRescaleWitness(tuple(diag))


def _check_dim(cone: CubicCone, x: Sequence) -> list[Fraction]:
    if len(x) != cone.m:
        raise ConeError(f"vector of length {len(x)} for a cone in dimension {cone.m}")
    return [Fraction(v) for v in x]


def in_cone_of(columns: Sequence[Sequence], x: Sequence) -> bool:
    """Exact test of ``x`` in the cone generated by ``columns``."""
    if not columns:
        return all(Fraction(v) == 0 for v in x)
    A = linalg.transpose([list(c) for c in columns])
    return find_nonneg_solution(A, x) is not None


def cone_member(cone: CubicCone, x: Sequence) -> bool:
    x = _check_dim(cone, x)
    return find_nonneg_solution(cone.lam, x) is not None


def cone_interior_member(cone: CubicCone, x: Sequence) -> InteriorResult:
    """Largest ``delta >= 0`` with ``x - delta * Lambda 1`` in ``K``; inside iff it is positive."""
    x = _check_dim(cone, x)
    ones = [sum(row, Fraction(0)) for row in cone.lam]
    A = [list(row) + [s] for row, s in zip(cone.lam, ones)]
    cost = [Fraction(0)] * cone.ngen + [Fraction(-1)]
    res = solve_lp(A, x, cost)
    if res.status == INFEASIBLE:
        return InteriorResult(False, Fraction(0))
    if res.status == UNBOUNDED:
        raise ConeError("unbounded interior margin: cone is not pointed")
    delta = res.x[-1]
    return InteriorResult(delta > 0, delta)


def quasipositivity_witness(cone: CubicCone, V: Sequence[Sequence]) -> QuasipositivityWitness:
    """Shift coefficients ``alpha_ik = |V^k Lambda_i|`` making ``Gamma V + alpha I`` map generators into K.

    The edge identity ``Gamma V L_i + alpha_i L_i = sum_k alpha_ik L_j(i,k)``
    is checked exactly for every generator before returning.
    """
    V = linalg.to_fractions(V)
    if len(V) != cone.n or any(len(row) != cone.m for row in V):
        raise ConeError("V must be n x m")
    neg_gt = [[-v for v in row] for row in linalg.transpose(cone.gamma)]
    if not qualitative_class_member(neg_gt, V, "Q0"):
        raise ConeError("V is not in Q0(-Gamma^T)")
    GV = linalg.matmul(cone.gamma, V)
    alpha_ik = []
    for i in range(1, cone.ngen + 1):
        Li = cone.generator(i)
        row = [abs(sum((a * b for a, b in zip(V[k], Li)), Fraction(0))) for k in range(cone.n)]
        alpha_ik.append(tuple(row))
        ai = sum(row, Fraction(0))
        lhs = [g + ai * l for g, l in zip(linalg.matvec(GV, Li), Li)]
        rhs = [Fraction(0)] * cone.m
        for k in range(cone.n):
            if row[k]:
                Lj = cone.generator(edge_partner(i, k + 1, cone.n).j)
                rhs = [s + row[k] * v for s, v in zip(rhs, Lj)]
        if lhs != rhs:
            raise ConeError(f"edge identity fails at generator {i}")
    alpha_i = tuple(sum(r, Fraction(0)) for r in alpha_ik)
    return QuasipositivityWitness(tuple(alpha_ik), alpha_i, max(alpha_i))


def min_shift(cone: CubicCone, J: Sequence[Sequence], i: int) -> Fraction | None:
    """Least ``alpha >= 0`` with ``J L_i + alpha L_i`` in K, or ``None`` if no such alpha."""
    Li = cone.generator(i)
    target = linalg.matvec(J, Li)
    A = [list(row) + [-l] for row, l in zip(cone.lam, Li)]
    cost = [Fraction(0)] * cone.ngen + [Fraction(1)]
    res = solve_lp(A, target, cost)
    if res.status != OPTIMAL:
        return None
    return res.x[-1]


def check_K_quasipositive(cone: CubicCone, J: Sequence[Sequence]) -> QuasipositivityResult:
    """One ``alpha >= 0`` working for every generator exists iff each generator admits one.

    Feasible shifts at a generator form a ray ``[alpha_i, inf)``, so the
    largest per-generator minimum is the least uniform shift.
    """
    J = linalg.to_fractions(J)
    best = Fraction(0)
    for i in range(1, cone.ngen + 1):
        a = min_shift(cone, J, i)
        if a is None:
            return QuasipositivityResult(False, None)
        best = max(best, a)
    return QuasipositivityResult(True, best)


def cube_faces(n: int):
    """Patterns for the nonempty faces of the n-cube other than the cube itself.

    Each coordinate is 0, 1 or ``None`` (free).
    """
    for pattern in itertools.product((0, 1, None), repeat=n):
        if all(p is None for p in pattern):
            continue
        yield pattern


def face_generators(n: int, pattern: Sequence) -> list[int]:
    """1-based Lambda columns lying on the cube face with this pattern."""
    B = build_cube_matrix(n)
    return [j for j in range(1, B.ncols + 1)
            if all(p is None or B.entries[k][j - 1] == p for k, p in enumerate(pattern))]


def is_K_positive(cone: CubicCone, M: Sequence[Sequence]) -> bool:
    M = linalg.to_fractions(M)
    return all(cone_member(cone, linalg.matvec(M, L)) for L in cone.generators())


def check_K_irreducible(cone: CubicCone, M: Sequence[Sequence]) -> bool:
    """True iff no nontrivial face of K is mapped into itself by the K-positive ``M``."""
    if cone.n > MAX_IRREDUCIBLE_DIM:
        raise ConeError(f"face enumeration limited to n <= {MAX_IRREDUCIBLE_DIM}")
    M = linalg.to_fractions(M)
    if not is_K_positive(cone, M):
        raise ConeError("M is not K-positive")
    images = {i: linalg.matvec(M, cone.generator(i)) for i in range(1, cone.ngen + 1)}
    for pattern in cube_faces(cone.n):
        idx = face_generators(cone.n, pattern)
        cols = [cone.generator(j) for j in idx]
        if all(in_cone_of(cols, images[j]) for j in idx):
            return False
    return True


def default_c_candidates(m: int) -> list[int]:
    """0-based unit-vector indices in search order: species m-1 (1-based), then 1..m."""
    first = m - 2
    order = [first] if first >= 0 else []
    order += [k for k in range(m) if k != first]
    return order


def unit_vector(m: int, k: int) -> tuple[Fraction, ...]:
    return tuple(Fraction(int(i == k)) for i in range(m))
