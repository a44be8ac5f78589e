import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import flip_partner
from crncert.cube import (
    CubeMatrix, EdgePartner, are_adjacent, build_cube_matrix, edge_partner, verify_vertex_extremality,
)


def test_cube_examples():
    assert build_cube_matrix(3).tolist() == [
        [0, 1, 0, 1, 0, 1, 0, 1],
        [0, 0, 1, 1, 0, 0, 1, 1],
        [0, 0, 0, 0, 1, 1, 1, 1],
    ]
    assert build_cube_matrix(1).tolist() == [[0, 1]]
    B2 = build_cube_matrix(2)
    assert [B2.column(j) for j in range(1, 5)] == [(0, 0), (1, 0), (0, 1), (1, 1)]


@pytest.mark.parametrize("n", range(1, 9))
def test_binary_counting_and_distinct_columns(n):
    B = build_cube_matrix(n)
    cols = [B.column(j) for j in range(1, B.ncols + 1)]
    assert len(set(cols)) == 2**n
    for j, col in enumerate(cols, start=1):
        assert sum(2**i * b for i, b in enumerate(col)) == j - 1


def test_cube_size_limits():
    with pytest.raises(ValueError):
        build_cube_matrix(0)
    with pytest.raises(ValueError):
        build_cube_matrix(21)


def test_edge_partner_examples():
    p = edge_partner(3, 3, 3)
    assert (p.j, p.sign) == (7, 1)
    B = build_cube_matrix(3)
    assert [a - b for a, b in zip(B.column(7), B.column(3))] == [0, 0, 1]
    for k in range(1, 4):
        assert edge_partner(1, k, 3) == EdgePartner(1 + 2 ** (k - 1), 1)
    p = edge_partner(2, 1, 2)
    assert (p.j, p.sign) == (1, -1)


def test_edge_partner_range_errors():
    with pytest.raises(ValueError):
        edge_partner(9, 1, 3)
    with pytest.raises(ValueError):
        edge_partner(1, 4, 3)


@given(st.data())
def test_edge_partner_properties(data):
    n = data.draw(st.integers(1, 8))
    i = data.draw(st.integers(1, 2**n))
    k = data.draw(st.integers(1, n))
    B = build_cube_matrix(n)
    p = edge_partner(i, k, n)
    assert p.j == flip_partner(i, k)
    assert p.sign == (1 if p.j > i else -1)
    back = edge_partner(p.j, k, n)
    assert back.j == i and back.sign == -p.sign
    diff = [a - b for a, b in zip(B.column(p.j), B.column(i))]
    assert diff == [p.sign * int(r == k - 1) for r in range(n)]
    assert sorted((B.column(i)[k - 1], B.column(p.j)[k - 1])) == [0, 1]


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_adjacency_rule_matches_hamming_distance(n):
    B = build_cube_matrix(n)
    for i in range(1, 2**n + 1):
        for j in range(i + 1, 2**n + 1):
            hamming = sum(a != b for a, b in zip(B.column(i), B.column(j)))
            assert are_adjacent(i, j) == (hamming == 1)


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_vertices_are_extreme(n):
    assert verify_vertex_extremality(build_cube_matrix(n))


def test_duplicate_column_not_extreme():
    B = CubeMatrix(2, ((0, 1, 1), (0, 0, 0)))
    assert not verify_vertex_extremality(B)


def test_extremality_size_limit():
    with pytest.raises(ValueError):
        verify_vertex_extremality(build_cube_matrix(7))
