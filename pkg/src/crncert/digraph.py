"""Bipartite species/reaction digraphs and strong connectivity."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .network import ReactionNetwork, stoichiometric_matrix

# vertex ids: ("u", i) for row i, ("v", j) for column j, both 0-based
Vertex = tuple[str, int]


@dataclass(frozen=True)
class BipartiteDigraph:
    m: int
    n: int
    arcs: frozenset[tuple[Vertex, Vertex]]
    row_names: tuple[str, ...] = ()
    col_names: tuple[str, ...] = ()

    def __post_init__(self):
        for a, b in self.arcs:
            if a[0] == b[0]:
                raise ValueError(f"arc {a} -> {b} does not cross the bipartition")

    @property
    def vertices(self) -> list[Vertex]:
        return [("u", i) for i in range(self.m)] + [("v", j) for j in range(self.n)]

    def label(self, vx: Vertex) -> str:
        kind, k = vx
        if kind == "u":
            return f"u:{self.row_names[k] if self.row_names else k + 1}"
        return f"v:{self.col_names[k] if self.col_names else k + 1}"

    def successors(self) -> dict[Vertex, list[Vertex]]:
        succ: dict[Vertex, list[Vertex]] = {vx: [] for vx in self.vertices}
        for a, b in sorted(self.arcs):
            succ[a].append(b)
        return succ

    def to_text(self) -> str:
        """One arc per line, rows first then columns, e.g. ``u:A -> v:2``."""
        order = {vx: k for k, vx in enumerate(self.vertices)}
        arcs = sorted(self.arcs, key=lambda ab: (order[ab[0]], order[ab[1]]))
        return "\n".join(f"{self.label(a)} -> {self.label(b)}" for a, b in arcs)


def build_bipartite_digraph(A: Sequence[Sequence], Bmat: Sequence[Sequence],
                            row_names: Sequence[str] = (), col_names: Sequence[str] = ()) -> BipartiteDigraph:
    """Arc ``u_i -> v_j`` iff ``A[i][j] != 0``; arc ``v_j -> u_i`` iff ``Bmat[j][i] != 0``."""
    m = len(A)
    n = len(A[0]) if m else len(Bmat)
    if any(len(row) != n for row in A) or len(Bmat) != n or any(len(row) != m for row in Bmat):
        raise ValueError("A must be m x n and Bmat n x m")
    arcs = set()
    for i in range(m):
        for j in range(n):
            if A[i][j] != 0:
                arcs.add((("u", i), ("v", j)))
            if Bmat[j][i] != 0:
                arcs.add((("v", j), ("u", i)))
    return BipartiteDigraph(m, n, frozenset(arcs), tuple(row_names), tuple(col_names))


def structural_digraph(net: ReactionNetwork) -> BipartiteDigraph:
    """The digraph of ``Gamma`` and the interior Jacobian zero pattern.

    An irreversible reaction's rate depends on its reactants only, so its
    reaction vertex points back to left-side species alone.
    """
    G = stoichiometric_matrix(net).entries
    Vpat = [[0] * net.m for _ in range(net.n)]
    for j, rx in enumerate(net.reactions):
        for i in range(net.m):
            if rx.reversible:
                Vpat[j][i] = G[i][j]
            elif i in rx.left_species:
                Vpat[j][i] = 1
    return build_bipartite_digraph(G, Vpat, net.species, [str(j + 1) for j in range(net.n)])


def strongly_connected_components(g: BipartiteDigraph) -> list[list[Vertex]]:
    """Tarjan's algorithm, iterative."""
    succ = g.successors()
    index: dict[Vertex, int] = {}
    low: dict[Vertex, int] = {}
    on_stack: set[Vertex] = set()
    stack: list[Vertex] = []
    comps: list[list[Vertex]] = []
    counter = 0
    for root in g.vertices:
        if root in index:
            continue
        work = [(root, 0)]
        while work:
            vx, pos = work.pop()
            if pos == 0:
                index[vx] = low[vx] = counter
                counter += 1
                stack.append(vx)
                on_stack.add(vx)
            nbrs = succ[vx]
            descended = False
            while pos < len(nbrs):
                w = nbrs[pos]
                pos += 1
                if w not in index:
                    work.append((vx, pos))
                    work.append((w, 0))
                    descended = True
                    break
                if w in on_stack:
                    low[vx] = min(low[vx], index[w])
            if descended:
                continue
            if low[vx] == index[vx]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack.discard(w)
                    comp.append(w)
                    if w == vx:
                        break
                comps.append(comp)
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[vx])
    return comps


def is_strongly_connected(g: BipartiteDigraph) -> bool:
    total = g.m + g.n
    if total <= 1:
        return True
    comps = strongly_connected_components(g)
    return len(comps) == 1 and len(comps[0]) == total
