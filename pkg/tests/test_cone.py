import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import (
    GAMMA2, GAMMA3, GAMMA_TAIL, LAMBDA3, LAMBDA_TAIL, P3, P_TAIL, brute_kernel_covector, flip_partner,
)
from crncert import linalg
from crncert.cone import (
    ConeError, build_cubic_cone, check_K_irreducible, check_K_quasipositive, cone_interior_member,
    cone_member, default_c_candidates, find_diagonal_rescale, find_nonneg_right_inverse, in_cone_of,
    kernel_covector, quasipositivity_witness, unit_vector, verify_right_inverse,
)
from crncert.cube import edge_partner
from crncert.kinetics import qualitative_class_member
from crncert.network import family_gamma
from crncert.simulate import float_cone_member


def e(m, k):
    """1-based unit vector."""
    return unit_vector(m, k - 1)


def family_cone(k):
    return build_cubic_cone(family_gamma(k), e(k + 1, k))


def tail_cone():
    return build_cubic_cone(GAMMA_TAIL, e(4, 3))


CONES = {f"R{k}": (lambda k=k: family_cone(k)) for k in (2, 3, 4)}
CONES["tail"] = tail_cone


def random_q0_matrix(gamma, rng):
    """Random rational n x m matrix in Q0(-Gamma^T)."""
    m, n = len(gamma), len(gamma[0])
    V = [[Fraction(0)] * m for _ in range(n)]
    for i in range(m):
        for j in range(n):
            if gamma[i][j]:
                s = -1 if gamma[i][j] > 0 else 1
                V[j][i] = s * Fraction(rng.randint(0, 9), rng.randint(1, 9))
    return V


def test_lambda_fixtures():
    assert [list(r) for r in family_cone(3).lam] == LAMBDA3
    assert [list(r) for r in tail_cone().lam] == LAMBDA_TAIL


@pytest.mark.parametrize("name", CONES)
def test_first_generator_is_c(name):
    cone = CONES[name]()
    assert cone.generator(1) == cone.c


def test_kernel_covector_examples():
    assert kernel_covector(GAMMA_TAIL, e(4, 3)) == (1, 2, 1, 1)
    assert kernel_covector(GAMMA2, e(3, 2)) == (2, 1, 1)
    assert kernel_covector(GAMMA2, [0, -1, 0]) == (-2, -1, -1)
    with pytest.raises(ConeError):
        kernel_covector([[1], [0]], [1, 0])


@pytest.mark.parametrize("k", [2, 3, 4])
def test_kernel_covector_matches_enumeration(k):
    G = family_gamma(k)
    c = e(k + 1, k)
    assert kernel_covector(G, c) == brute_kernel_covector(G, c)


def test_build_cone_errors():
    with pytest.raises(ConeError):
        build_cubic_cone(GAMMA2, [0, 1, -1])  # first column of Gamma
    with pytest.raises(ConeError):
        build_cubic_cone([[1, 1], [1, 1], [0, 0]], [0, 0, 1])
    with pytest.raises(ConeError):
        build_cubic_cone([[1, 0], [0, 1]], [1, 1])


def test_right_inverse_examples():
    cone = family_cone(3)
    w = find_nonneg_right_inverse(cone.lam)
    assert w is not None and w.verify(cone.lam)
    assert verify_right_inverse(LAMBDA3, P3)
    assert verify_right_inverse(LAMBDA_TAIL, P_TAIL)
    eye = linalg.identity(3)
    assert [list(r) for r in find_nonneg_right_inverse(eye).P] == eye
    assert find_nonneg_right_inverse([[1, 1], [0, 1]]) is None


def test_right_inverse_rejects_negative_entry():
    bad = [list(r) for r in P3]
    bad[7][0] = Fraction(-1)
    assert not verify_right_inverse(LAMBDA3, bad)


def test_diagonal_rescale_examples():
    assert find_diagonal_rescale(LAMBDA_TAIL).diagonal == (Fraction(1, 2), 1, 1, 1)
    for k in (2, 3, 4, 5):
        assert set(find_diagonal_rescale(family_cone(k).lam).diagonal) == {1}
    assert find_diagonal_rescale([[1, 2, -1], [0, 1, 1]]) is None
    assert find_diagonal_rescale([[0, 0], [3, -3]]).diagonal == (1, Fraction(1, 3))


def test_membership_examples():
    cone = family_cone(3)
    for i in range(1, 5):
        assert cone_member(cone, e(4, i))
    assert cone_member(cone, [0] * 4)
    assert not cone_member(cone, [-v for v in cone.c])
    with pytest.raises(ConeError):
        cone_member(cone, [1, 2])


def test_interior_examples():
    cone = family_cone(3)
    total = [sum(row) for row in cone.lam]
    res = cone_interior_member(cone, total)
    assert res.inside and res.margin >= 1
    assert not cone_interior_member(cone, cone.generator(1)).inside
    res0 = cone_interior_member(cone, [0] * 4)
    assert not res0.inside and res0.margin == 0


@pytest.mark.parametrize("name", CONES)
def test_duality_and_edge_identity(name):
    cone = CONES[name]()
    rc = sum(a * b for a, b in zip(cone.r, cone.c))
    assert rc > 0
    for L in cone.generators():
        assert sum(a * b for a, b in zip(cone.r, L)) == rc
    for i in range(1, cone.ngen + 1):
        for k in range(1, cone.n + 1):
            j = flip_partner(i, k)
            s = 1 if j > i else -1
            diff = [s * (a - b) for a, b in zip(cone.generator(j), cone.generator(i))]
            assert diff == [row[k - 1] for row in cone.gamma]


@pytest.mark.parametrize("name", CONES)
def test_generators_are_extreme_rays(name):
    cone = CONES[name]()
    gens = cone.generators()
    for i, L in enumerate(gens):
        assert not in_cone_of(gens[:i] + gens[i + 1:], L)


@pytest.mark.parametrize("name", CONES)
def test_edge_sums_keep_weak_sign(name):
    cone = CONES[name]()
    assert find_diagonal_rescale(cone.lam) is not None
    for i in range(1, cone.ngen + 1):
        for k in range(1, cone.n + 1):
            a = cone.generator(i)
            b = cone.generator(edge_partner(i, k, cone.n).j)
            s = [x + y for x, y in zip(a, b)]
            assert qualitative_class_member([a], [s], "Q1")
            assert qualitative_class_member([b], [s], "Q1")


@pytest.mark.parametrize("name", CONES)
def test_orthant_inside_when_right_inverse_exists(name):
    cone = CONES[name]()
    assert find_nonneg_right_inverse(cone.lam) is not None
    assert all(cone_member(cone, e(cone.m, i)) for i in range(1, cone.m + 1))


@pytest.mark.parametrize("name", CONES)
def test_float_membership_agrees_with_exact(name):
    cone = CONES[name]()
    lam = np.array([[float(v) for v in row] for row in cone.lam])
    rng = np.random.default_rng(2024)
    per_cone = 250
    for _ in range(per_cone):
        x = rng.integers(-3, 4, cone.m)
        assert cone_member(cone, x.tolist()) == float_cone_member(lam, x.astype(float), 1e-9)


def test_quasipositivity_identity_at_negative_transpose():
    cone = build_cubic_cone(GAMMA2, e(3, 2))
    V = [[-v for v in row] for row in linalg.transpose(GAMMA2)]
    w = quasipositivity_witness(cone, V)
    GV = linalg.matmul(GAMMA2, V)
    for i in range(1, 5):
        L = cone.generator(i)
        lhs = [a + w.alpha_i[i - 1] * b for a, b in zip(linalg.matvec(GV, L), L)]
        rhs = [Fraction(0)] * 3
        for k in range(1, 3):
            Lj = cone.generator(flip_partner(i, k))
            rhs = [s + w.alpha_ik[i - 1][k - 1] * v for s, v in zip(rhs, Lj)]
        assert lhs == rhs
    assert w.alpha == max(w.alpha_i)


def test_quasipositivity_zero_map():
    cone = family_cone(3)
    w = quasipositivity_witness(cone, [[0] * 4 for _ in range(3)])
    assert w.alpha == 0 and set(w.alpha_i) == {0}


def test_quasipositivity_random_rational_v():
    cone = family_cone(3)
    rng = random.Random(5)
    for _ in range(50):
        quasipositivity_witness(cone, random_q0_matrix(GAMMA3, rng))


def test_quasipositivity_rejects_wrong_sign_class():
    cone = build_cubic_cone(GAMMA2, e(3, 2))
    with pytest.raises(ConeError):
        quasipositivity_witness(cone, linalg.transpose(GAMMA2))


def test_K_quasipositive_examples():
    cone = build_cubic_cone(GAMMA2, e(3, 2))
    res = check_K_quasipositive(cone, linalg.identity(3))
    assert res.quasipositive and res.alpha == 0
    V = [[-v for v in row] for row in linalg.transpose(GAMMA2)]
    J = linalg.matmul(GAMMA2, V)
    res = check_K_quasipositive(cone, J)
    assert res.quasipositive and res.alpha <= quasipositivity_witness(cone, V).alpha
    # maps all of K onto the opposite of one extreme ray
    rc = sum(a * b for a, b in zip(cone.r, cone.c))
    L2 = cone.generator(2)
    J_bad = [[-L2[a] * cone.r[b] / rc for b in range(3)] for a in range(3)]
    assert linalg.matvec(J_bad, cone.generator(1)) == [-v for v in L2]
    assert not check_K_quasipositive(cone, J_bad).quasipositive


@given(st.integers(0, 10**6))
def test_gamma_v_always_quasipositive(seed):
    cone = family_cone(3)
    V = random_q0_matrix(GAMMA3, random.Random(seed))
    res = check_K_quasipositive(cone, linalg.matmul(GAMMA3, V))
    assert res.quasipositive
    assert res.alpha <= quasipositivity_witness(cone, V).alpha


def test_K_irreducible_examples():
    cone = build_cubic_cone(GAMMA2, e(3, 2))
    assert not check_K_irreducible(cone, linalg.identity(3))
    assert not check_K_irreducible(cone, [[0] * 3 for _ in range(3)])
    V = [[-v for v in row] for row in linalg.transpose(GAMMA2)]
    J = linalg.matmul(GAMMA2, V)
    alpha = check_K_quasipositive(cone, J).alpha
    M = [[J[a][b] + (alpha if a == b else 0) for b in range(3)] for a in range(3)]
    assert check_K_irreducible(cone, M)
    M_big = [[J[a][b] + (alpha + 1 if a == b else 0) for b in range(3)] for a in range(3)]
    assert check_K_irreducible(cone, M_big)


def test_K_irreducible_preconditions():
    cone = build_cubic_cone(GAMMA2, e(3, 2))
    with pytest.raises(ConeError):
        check_K_irreducible(cone, [[-1 if a == b else 0 for b in range(3)] for a in range(3)])
    with pytest.raises(ConeError):
        check_K_irreducible(family_cone(6), linalg.identity(7))


def test_default_c_order():
    assert default_c_candidates(4) == [2, 0, 1, 3]
    assert default_c_candidates(1) == [0]


def test_cone_serializes_rationals_as_strings():
    d = tail_cone().to_dict()
    assert d["r"] == ["1/1", "2/1", "1/1", "1/1"]
    assert all(isinstance(v, str) for row in d["lambda"] for v in row)
