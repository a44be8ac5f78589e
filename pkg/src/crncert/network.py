"""Reaction networks: data model, text format, stoichiometry and boundary faces."""

from __future__ import annotations

import re
import string
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

MAX_FACE_SPECIES = 24

_TERM = re.compile(r"^(\d+)?\s*([A-Za-z_][A-Za-z0-9_]*)$")
_EMPTY_SIDE = {"0", "∅"}


class NetworkError(ValueError):
    """Malformed reaction text or an invalid network."""


@dataclass(frozen=True)
class Reaction:
    left: tuple[tuple[int, int], ...]
    right: tuple[tuple[int, int], ...]
    reversible: bool = True

    @property
    def left_species(self) -> tuple[int, ...]:
        return tuple(i for i, _ in self.left)

    @property
    def right_species(self) -> tuple[int, ...]:
        return tuple(i for i, _ in self.right)


@dataclass(frozen=True)
class ReactionNetwork:
    species: tuple[str, ...]
    reactions: tuple[Reaction, ...]

    def __post_init__(self):
        m = len(self.species)
        if len(set(self.species)) != m:
            raise NetworkError("duplicate species names")
        for j, rx in enumerate(self.reactions):
            for i, a in rx.left + rx.right:
                if not 0 <= i < m:
                    raise NetworkError(f"reaction {j + 1}: species index {i} out of range")
                if a <= 0:
                    raise NetworkError(f"reaction {j + 1}: non-positive coefficient {a}")
            both = set(rx.left_species) & set(rx.right_species)
            if both:
                names = ", ".join(self.species[i] for i in sorted(both))
                raise NetworkError(f"reaction {j + 1}: species {names} on both sides")

    @property
    def m(self) -> int:
        return len(self.species)

    @property
    def n(self) -> int:
        return len(self.reactions)

    @property
    def all_reversible(self) -> bool:
        return all(rx.reversible for rx in self.reactions)

    def index(self, name: str) -> int:
        return self.species.index(name)

    def permuted(self, species_order: Sequence[int], reaction_order: Sequence[int]) -> "ReactionNetwork":
        """Same network with species and reactions listed in the given (old-index) orders."""
        new_of_old = {old: new for new, old in enumerate(species_order)}
        rxs = []
        for j in reaction_order:
            rx = self.reactions[j]
            rxs.append(Reaction(
                tuple(sorted((new_of_old[i], a) for i, a in rx.left)),
                tuple(sorted((new_of_old[i], a) for i, a in rx.right)),
                rx.reversible,
            ))
        return ReactionNetwork(tuple(self.species[i] for i in species_order), tuple(rxs))


@dataclass(frozen=True)
class StoichiometricMatrix:
    entries: tuple[tuple[int, ...], ...]
    m: int
    n: int

    def tolist(self) -> list[list[int]]:
        return [list(r) for r in self.entries]

    def as_fractions(self) -> list[list[Fraction]]:
        return [[Fraction(v) for v in r] for r in self.entries]

    def column(self, j: int) -> tuple[int, ...]:
        return tuple(r[j] for r in self.entries)

    def to_numpy(self) -> np.ndarray:
        return np.array(self.entries, dtype=float).reshape(self.m, self.n)


@dataclass(frozen=True)
class ElementaryFaceReport:
    all_repelling: bool
    failing_zero_sets: tuple[tuple[int, ...], ...]
    species: tuple[str, ...] = ()

    def failing_names(self) -> list[list[str]]:
        return [[self.species[i] for i in z] for z in self.failing_zero_sets]


def _parse_side(text: str, lineno: int) -> list[tuple[str, int]]:
    text = text.strip()
    if text in _EMPTY_SIDE:
        return []
    if not text:
        raise NetworkError(f"line {lineno}: empty reaction side (use 0 for the empty complex)")
    terms = []
    for raw in text.split("+"):
        mt = _TERM.match(raw.strip())
        if not mt:
            raise NetworkError(f"line {lineno}: cannot parse term {raw.strip()!r}")
        coeff = int(mt.group(1)) if mt.group(1) else 1
        if coeff <= 0:
            raise NetworkError(f"line {lineno}: coefficient must be positive")
        terms.append((mt.group(2), coeff))
    return terms


def _split_arrow(line: str, lineno: int) -> tuple[str, str, bool]:
    if line.count("<->") == 1 and line.count("->") == 1:
        lhs, rhs = line.split("<->")
        return lhs, rhs, True
    if line.count("->") == 1 and "<" not in line:
        lhs, rhs = line.split("->")
        return lhs, rhs, False
    if line.count("->") > 1:
        raise NetworkError(f"line {lineno}: more than one arrow; write one reaction per line")
    raise NetworkError(f"line {lineno}: unknown or missing arrow token (use '<->' or '->')")


def parse_network(text: str) -> ReactionNetwork:
    """Parse the line-oriented reaction format.

    ``#`` starts a comment; an optional ``species: A B C`` line pins the
    species order, otherwise species are numbered by first appearance.
    """
    header: list[str] | None = None
    parsed = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.lower().startswith("species:"):
            if header is not None or parsed:
                raise NetworkError(f"line {lineno}: species header must come first and only once")
            header = line.split(":", 1)[1].split()
            for name in header:
                if not _TERM.match(name) or name[0].isdigit():
                    raise NetworkError(f"line {lineno}: bad species name {name!r}")
            continue
        lhs, rhs, rev = _split_arrow(line, lineno)
        parsed.append((_parse_side(lhs, lineno), _parse_side(rhs, lineno), rev, lineno))

    species: list[str] = list(header) if header is not None else []
    if len(set(species)) != len(species):
        raise NetworkError("species header lists a name twice")
    index = {s: i for i, s in enumerate(species)}

    reactions = []
    for left, right, rev, lineno in parsed:
        sides = []
        for terms in (left, right):
            acc: dict[int, int] = {}
            for name, coeff in terms:
                if name not in index:
                    if header is not None:
                        raise NetworkError(f"line {lineno}: species {name!r} not in header")
                    index[name] = len(species)
                    species.append(name)
                acc[index[name]] = acc.get(index[name], 0) + coeff
            sides.append(tuple(sorted(acc.items())))
        both = set(i for i, _ in sides[0]) & set(i for i, _ in sides[1])
        if both:
            names = ", ".join(species[i] for i in sorted(both))
            raise NetworkError(f"line {lineno}: species {names} on both sides of one reaction")
        reactions.append(Reaction(sides[0], sides[1], rev))
    return ReactionNetwork(tuple(species), tuple(reactions))


def _render_side(net: ReactionNetwork, side: Iterable[tuple[int, int]]) -> str:
    terms = [(f"{a}{net.species[i]}" if a != 1 else net.species[i]) for i, a in side]
    return " + ".join(terms) if terms else "0"


def render_reaction(net: ReactionNetwork, j: int) -> str:
    rx = net.reactions[j]
    arrow = "<->" if rx.reversible else "->"
    return f"{_render_side(net, rx.left)} {arrow} {_render_side(net, rx.right)}"


def _first_appearance(net: ReactionNetwork) -> list[int]:
    seen: list[int] = []
    for rx in net.reactions:
        for i, _ in rx.left + rx.right:
            if i not in seen:
                seen.append(i)
    return seen


def render(net: ReactionNetwork) -> str:
    """Canonical text; a species header is emitted only when order needs pinning."""
    lines = []
    if _first_appearance(net) != list(range(net.m)):
        lines.append("species: " + " ".join(net.species))
    lines.extend(render_reaction(net, j) for j in range(net.n))
    return "\n".join(lines)


def stoichiometric_matrix(net: ReactionNetwork) -> StoichiometricMatrix:
    G = [[0] * net.n for _ in range(net.m)]
    for j, rx in enumerate(net.reactions):
        for i, a in rx.right:
            G[i][j] += a
        for i, a in rx.left:
            G[i][j] -= a
    return StoichiometricMatrix(tuple(tuple(r) for r in G), net.m, net.n)


def species_names(count: int) -> tuple[str, ...]:
    if count <= 26:
        return tuple(string.ascii_uppercase[:count])
    return tuple(f"S{i + 1}" for i in range(count))


def family_gamma(k: int) -> list[list[int]]:
    """The (k+1) x k stoichiometric matrix of the R^(k) family from its column rules."""
    if k < 2:
        raise NetworkError("family index must be >= 2")
    G = [[0] * k for _ in range(k + 1)]
    # 1-based rules, stored 0-based
    G[k - 1][0] = -1
    G[k][0] = 1
    for j in range(2, k):
        G[k - j][j - 1] = 1
        G[k - j + 1][j - 1] = -1
    G[0][k - 1] = 1
    G[1][k - 1] = -1
    G[k][k - 1] = -1
    return G


def network_from_gamma(gamma: Sequence[Sequence[int]], species: Sequence[str],
                       reversible: bool = True) -> ReactionNetwork:
    """Reactions whose left side holds the negative and right side the positive entries."""
    m = len(gamma)
    n = len(gamma[0]) if m else 0
    rxs = []
    for j in range(n):
        left = tuple((i, -gamma[i][j]) for i in range(m) if gamma[i][j] < 0)
        right = tuple((i, gamma[i][j]) for i in range(m) if gamma[i][j] > 0)
        rxs.append(Reaction(left, right, reversible))
    return ReactionNetwork(tuple(species), tuple(rxs))


def family_network(k: int) -> ReactionNetwork:
    """R^(k): k+1 species A, B, ... and k reversible reactions, columns in rule order."""
    G = family_gamma(k)
    return network_from_gamma(G, species_names(k + 1))


def family_display_text(k: int) -> str:
    """R^(k) listed the way it is usually drawn: ``A <-> B + X`` then the chain ``B <-> ... <-> X``."""
    if k < 2:
        raise NetworkError("family index must be >= 2")
    names = species_names(k + 1)
    last = names[k]
    lines = [f"{names[0]} <-> {names[1]} + {last}"]
    lines += [f"{names[i]} <-> {names[i + 1]}" for i in range(1, k)]
    if k > 2:
        lines.insert(0, "species: " + " ".join(names))
    return "\n".join(lines)


def tail_network() -> ReactionNetwork:
    """2A <-> B <-> C + D, C <-> D with rows A..D and the column order C<->D, C+D<->B, B<->2A."""
    return parse_network("species: A B C D\nC <-> D\nC + D <-> B\nB <-> 2A")


def repelling_faces_check(net: ReactionNetwork) -> ElementaryFaceReport:
    """Certify every nontrivial boundary face of the orthant as repelling.

    For a fully reversible network with no species on both sides of a
    reaction, the face with the species in ``Z`` zeroed fails to repel iff
    every column of the row-submatrix ``Gamma[Z, :]`` is zero or has entries
    of both signs.
    """
    if not net.all_reversible:
        raise NetworkError("face criterion only established for fully reversible networks")
    m = net.m
    if m > MAX_FACE_SPECIES:
        raise NetworkError(f"{m} species exceeds the exhaustive face limit of {MAX_FACE_SPECIES}")
    if m < 2:
        return ElementaryFaceReport(True, (), net.species)
    G = stoichiometric_matrix(net).entries
    neg = [sum(1 << i for i in range(m) if G[i][j] < 0) for j in range(net.n)]
    pos = [sum(1 << i for i in range(m) if G[i][j] > 0) for j in range(net.n)]

    failing = []
    chunk = 1 << 16
    total = (1 << m) - 1
    for start in range(1, total, chunk):
        Z = np.arange(start, min(start + chunk, total), dtype=np.int64)
        repels = np.zeros(Z.shape, dtype=bool)
        for nm, pm in zip(neg, pos):
            hit_n = (Z & nm) != 0
            hit_p = (Z & pm) != 0
            repels |= hit_n ^ hit_p
        for z in Z[~repels]:
            failing.append(tuple(i for i in range(m) if (int(z) >> i) & 1))
    failing.sort(key=lambda s: (len(s), s))
    return ElementaryFaceReport(not failing, tuple(failing), net.species)
