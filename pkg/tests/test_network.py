import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import GAMMA2, GAMMA3, GAMMA4, GAMMA_TAIL
from crncert import linalg
from crncert.kinetics import KineticModel
from crncert.network import (
    NetworkError, Reaction, ReactionNetwork, family_display_text, family_gamma, family_network,
    parse_network, render, repelling_faces_check, stoichiometric_matrix, tail_network,
)


def test_parse_two_reactions():
    net = parse_network("A <-> B + C\nB <-> C")
    assert net.species == ("A", "B", "C")
    assert net.n == 2 and net.all_reversible


def test_parse_coefficient_forms():
    for text in ("2A <-> B", "2 A <-> B"):
        net = parse_network(text)
        assert net.reactions[0].left == ((0, 2),)


def test_parse_rejects_species_on_both_sides():
    with pytest.raises(NetworkError, match="both sides"):
        parse_network("A -> A + B")


@pytest.mark.parametrize("text", ["A => B", "A <- B", "A -> B -> C", "A + <-> B", "A <->", "species: A\nB -> A"])
def test_parse_rejects_malformed(text):
    with pytest.raises(NetworkError):
        parse_network(text)


def test_parse_comments_header_and_empty_complex():
    net = parse_network("# a comment\nspecies: B A\nA -> 0  # decay\n0 -> B\n")
    assert net.species == ("B", "A")
    assert net.reactions[0] == Reaction(((1, 1),), (), False)
    assert stoichiometric_matrix(net).tolist() == [[0, 1], [-1, 0]]


def test_stoichiometry_examples():
    assert stoichiometric_matrix(family_network(2)).tolist() == GAMMA2
    assert stoichiometric_matrix(parse_network("A <-> B")).tolist() == [[-1], [1]]
    assert stoichiometric_matrix(tail_network()).tolist() == GAMMA_TAIL


def test_tail_network_in_natural_order():
    net = parse_network("2A <-> B\nB <-> C + D\nC <-> D")
    assert stoichiometric_matrix(net).tolist() == [[-2, 0, 0], [1, -1, 0], [0, 1, -1], [0, 1, 1]]


def test_family_matrices():
    assert family_gamma(2) == GAMMA2
    assert family_gamma(3) == GAMMA3
    assert family_gamma(4) == GAMMA4
    assert stoichiometric_matrix(family_network(3)).tolist() == GAMMA3
    with pytest.raises(NetworkError):
        family_network(1)


def test_family_display_text_describes_same_network():
    assert family_display_text(2) == "A <-> B + C\nB <-> C"
    for k in range(2, 9):
        shown = parse_network(family_display_text(k))
        G = stoichiometric_matrix(shown).tolist()
        cols = {tuple(r[j] for r in G) for j in range(k)}
        cols_neg = {tuple(-v for v in c) for c in cols}
        target = {tuple(r[j] for r in family_gamma(k)) for j in range(k)}
        # same reactions up to ordering and direction
        assert all(c in cols or c in cols_neg for c in target)


@pytest.mark.parametrize("k", range(2, 9))
def test_family_rank_and_trivial_kernel(k):
    G = family_gamma(k)
    assert len(G) == k + 1 and len(G[0]) == k
    assert linalg.rank(G) == k
    assert linalg.nullspace(G, k) == []


@pytest.mark.parametrize("k", range(2, 9))
def test_family_partial_column_sums(k):
    G = np.array(family_gamma(k))
    for mask in itertools.product((0, 1), repeat=k):
        s = G @ np.array(mask)
        for row, v in enumerate(s, start=1):
            allowed = {-2, -1, 0} if row == k else {-1, 0, 1}
            assert v in allowed


@pytest.mark.parametrize("net", [family_network(k) for k in (2, 3, 4, 5)] + [tail_network()])
def test_render_round_trip_fixtures(net):
    back = parse_network(render(net))
    assert back == net
    assert stoichiometric_matrix(back) == stoichiometric_matrix(net)


@st.composite
def networks(draw, max_species=4, reversible=None):
    m = draw(st.integers(2, max_species))
    n = draw(st.integers(1, 4))
    names = tuple("ABCDEFGH"[:m])
    rxs = []
    for _ in range(n):
        role = draw(st.lists(st.sampled_from(["L", "R", "-"]), min_size=m, max_size=m))
        left = tuple((i, draw(st.integers(1, 2))) for i in range(m) if role[i] == "L")
        right = tuple((i, draw(st.integers(1, 2))) for i in range(m) if role[i] == "R")
        if not left and not right:
            right = ((0, 1),)
        rev = True if reversible is True else draw(st.booleans())
        rxs.append(Reaction(left, right, rev))
    return ReactionNetwork(names, tuple(rxs))


@given(networks())
def test_render_round_trip_random(net):
    back = parse_network(render(net))
    assert stoichiometric_matrix(back) == stoichiometric_matrix(net)
    assert [rx.reversible for rx in back.reactions] == [rx.reversible for rx in net.reactions]


def dynamic_face_fails(net, Z, rng):
    """Unit mass action at a random positive point of the face: no zeroed species moves."""
    model = KineticModel.unit(net)
    x = rng.uniform(0.5, 2.0, net.m)
    x[list(Z)] = 0.0
    dx = model.rhs(x)
    return bool(np.all(np.abs(dx[list(Z)]) < 1e-14))


@given(networks(reversible=True), st.integers(0, 2**32 - 1))
def test_faces_agree_with_dynamic_oracle(net, seed):
    rng = np.random.default_rng(seed)
    report = repelling_faces_check(net)
    failing = set(report.failing_zero_sets)
    for size in range(1, net.m):
        for Z in itertools.combinations(range(net.m), size):
            assert (Z in failing) == dynamic_face_fails(net, Z, rng)
    assert report.all_repelling == (not failing)


@pytest.mark.parametrize("net", [family_network(2), family_network(3), family_network(4), tail_network()])
def test_certified_fixtures_have_no_failing_faces(net):
    assert repelling_faces_check(net).all_repelling


def test_abc_has_siphons():
    report = repelling_faces_check(parse_network("A + B <-> C"))
    assert not report.all_repelling
    assert ["A", "C"] in report.failing_names()
    assert report.failing_names() == [["A", "C"], ["B", "C"]]


def test_face_check_refuses_irreversible_and_large():
    with pytest.raises(NetworkError):
        repelling_faces_check(parse_network("A -> B"))
    big = family_network(25)
    with pytest.raises(NetworkError, match="exceeds"):
        repelling_faces_check(big)


def test_permuted_network_keeps_columns():
    net = tail_network()
    p = net.permuted([3, 2, 1, 0], [2, 0, 1])
    G, H = stoichiometric_matrix(net).tolist(), stoichiometric_matrix(p).tolist()
    for new_i, old_i in enumerate([3, 2, 1, 0]):
        assert H[new_i] == [G[old_i][j] for j in [2, 0, 1]]
