"""Non-commutation graphs over Hamiltonian terms and their colourings.

Vertex ``i`` is term ``i``; an edge joins two terms that do not commute under
the chosen mode. A proper colouring of this graph is a partition of the terms
into commuting groups, one group per colour.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .pauli import CommutationMode, Hamiltonian, PauliString, commutes

__all__ = [
    "Graph",
    "Coloring",
    "Grouping",
    "ExactResult",
    "InvalidColoringError",
    "build_noncommutation_graph",
    "greedy_coloring",
    "exhaustive_chromatic",
    "validate_coloring",
    "grouping_from_coloring",
    "naive_grouping",
    "render_edge_list",
    "parse_edge_list",
]


@dataclass(frozen=True)
class Graph:
    n_vertices: int
    edges: frozenset[tuple[int, int]]

    def __post_init__(self):
        for i, j in self.edges:
            if not (0 <= i < j < self.n_vertices):
                raise ValueError(f"bad edge ({i}, {j}) for {self.n_vertices} vertices")

    @classmethod
    def from_edges(cls, n_vertices: int, edges: Iterable[tuple[int, int]]) -> Graph:
        norm = set()
        for i, j in edges:
            if i == j:
                raise ValueError(f"self-loop at vertex {i}")
            norm.add((min(i, j), max(i, j)))
        return cls(n_vertices, frozenset(norm))

    def adjacency(self) -> list[set[int]]:
        adj: list[set[int]] = [set() for _ in range(self.n_vertices)]
        for i, j in self.edges:
            adj[i].add(j)
            adj[j].add(i)
        return adj

    def degrees(self) -> list[int]:
        return [len(a) for a in self.adjacency()]

    def sorted_edges(self) -> list[tuple[int, int]]:
        return sorted(self.edges)


@dataclass(frozen=True)
class Coloring:
    color_of: tuple[int, ...]
    n_colors: int

    @classmethod
    def compact(cls, colors: Sequence[int]) -> Coloring:
        """Renumber colours ``0..k-1`` in order of first use by vertex index."""
        relabel: dict[int, int] = {}
        out = []
        for c in colors:
            if c not in relabel:
                relabel[c] = len(relabel)
            out.append(relabel[c])
        return cls(tuple(out), len(relabel))

    def classes(self) -> list[list[int]]:
        groups: list[list[int]] = [[] for _ in range(self.n_colors)]
        for v, c in enumerate(self.color_of):
            groups[c].append(v)
        return groups


@dataclass(frozen=True)
class Grouping:
    groups: tuple[tuple[int, ...], ...]
    mode: str

    def __len__(self):
        return len(self.groups)

    def canonical(self) -> frozenset[frozenset[int]]:
        """Colour-label-free form, for comparing groupings."""
        return frozenset(frozenset(g) for g in self.groups)


class InvalidColoringError(ValueError):
    pass


def build_noncommutation_graph(h: Hamiltonian, mode: CommutationMode | str) -> Graph:
    strings = h.strings
    m = len(strings)
    edges = [
        (i, j)
        for i in range(m)
        for j in range(i + 1, m)
        if not commutes(strings[i], strings[j], mode)
    ]
    return Graph(m, frozenset(edges))


def greedy_coloring(g: Graph, strategy: str = "largest_first") -> Coloring:
    """Greedy colouring with the largest-first vertex order.

    Vertices are visited by decreasing degree, ties broken by lower index;
    each takes the smallest colour not used by an already coloured neighbour.
    Isolated vertices therefore come last and always take colour 0.
    """
    if strategy != "largest_first":
        raise ValueError(f"unknown strategy {strategy!r}")
    adj = g.adjacency()
    order = sorted(range(g.n_vertices), key=lambda v: (-len(adj[v]), v))
    colors = [-1] * g.n_vertices
    for v in order:
        used = {colors[w] for w in adj[v] if colors[w] >= 0}
        c = 0
        while c in used:
            c += 1
        colors[v] = c
    return Coloring.compact(colors)


@dataclass(frozen=True)
class ExactResult:
    """Outcome of :func:`exhaustive_chromatic`.

    ``status`` is ``"optimal"`` (coloring is minimal), ``"infeasible"`` (no
    colouring with at most ``max_k`` colours) or ``"unknown"`` (budget ran
    out; ``coloring`` may hold the best colouring seen so far, which is not
    proven minimal).
    """

    status: str
    coloring: Coloring | None
    lower_bound: int
    nodes: int = field(default=0, compare=False)


class _Budget(Exception):
    pass


def _greedy_clique(adj: list[set[int]]) -> list[int]:
    best: list[int] = []
    for start in range(len(adj)):
        clique = [start]
        cand = set(adj[start])
        while cand:
            v = max(cand, key=lambda w: (len(adj[w] & cand), -w))
            clique.append(v)
            cand &= adj[v]
        if len(clique) > len(best):
            best = clique
    return best


def _k_colorable(adj, k, seed_clique, deadline, max_nodes, counter):
    n = len(adj)
    colors = [-1] * n
    # neighbour colour counts drive the saturation order
    nb_count = [[0] * k for _ in range(n)]

    def assign(v, c, sign):
        for w in adj[v]:
            nb_count[w][c] += sign

    for c, v in enumerate(seed_clique):
        colors[v] = c
        assign(v, c, 1)

    def pick():
        best, key = -1, None
        for v in range(n):
            if colors[v] < 0:
                sat = sum(1 for c in range(k) if nb_count[v][c])
                kv = (sat, len(adj[v]), -v)
                if key is None or kv > key:
                    best, key = v, kv
        return best

    def solve(n_left, used):
        if n_left == 0:
            return True
        counter[0] += 1
        if counter[0] > max_nodes or (counter[0] & 1023) == 0 and time.monotonic() > deadline:
            raise _Budget
        v = pick()
        # symmetry breaking: only one fresh colour is worth trying
        for c in range(min(used + 1, k)):
            if nb_count[v][c] == 0:
                colors[v] = c
                assign(v, c, 1)
                if solve(n_left - 1, max(used, c + 1)):
                    return True
                assign(v, c, -1)
                colors[v] = -1
        return False

    if solve(n - len(seed_clique), len(seed_clique)):
        return colors
    return None


def exhaustive_chromatic(
    g: Graph, max_k: int, time_limit: float = 30.0, max_nodes: int = 5_000_000
) -> ExactResult:
    """Minimum colouring by backtracking, trying ``k = lower_bound, ..., max_k``.

    The lower bound is the size of a greedily grown clique, whose vertices
    are pre-coloured. Search uses a saturation (DSATUR) vertex order. When the
    time or node budget runs out the result is ``"unknown"``, never a wrong
    answer.
    """
    if g.n_vertices == 0:
        return ExactResult("optimal", Coloring((), 0), 0)
    adj = g.adjacency()
    clique = _greedy_clique(adj)
    lower = len(clique)
    deadline = time.monotonic() + time_limit
    counter = [0]
    for k in range(lower, max_k + 1):
        try:
            colors = _k_colorable(adj, k, clique, deadline, max_nodes, counter)
        except _Budget:
            return ExactResult("unknown", None, k, counter[0])
        if colors is not None:
            return ExactResult("optimal", Coloring.compact(colors), k, counter[0])
    return ExactResult("infeasible", None, max(lower, max_k + 1), counter[0])


def validate_coloring(g: Graph, c: Coloring) -> bool:
    if len(c.color_of) != g.n_vertices:
        raise ValueError(
            f"coloring has {len(c.color_of)} entries for {g.n_vertices} vertices"
        )
    return all(c.color_of[i] != c.color_of[j] for i, j in g.edges)


def grouping_from_coloring(
    h: Hamiltonian, c: Coloring, mode: CommutationMode | str
) -> Grouping:
    """One group per colour class; commutation inside each group is re-checked."""
    if len(c.color_of) != len(h):
        raise InvalidColoringError(f"coloring has {len(c.color_of)} entries for {len(h)} terms")
    strings = h.strings
    groups = [tuple(cls) for cls in c.classes() if cls]
    for grp in groups:
        for a in range(len(grp)):
            for b in range(a + 1, len(grp)):
                i, j = grp[a], grp[b]
                if not commutes(strings[i], strings[j], mode):
                    raise InvalidColoringError(
                        f"terms {i} ({strings[i]}) and {j} ({strings[j]}) share a colour "
                        f"but do not commute"
                    )
    return Grouping(tuple(groups), CommutationMode(mode).value)


def naive_grouping(h: Hamiltonian) -> Grouping:
    return Grouping(tuple((i,) for i in range(len(h))), "naive")


def group_strings(h: Hamiltonian, grouping: Grouping) -> list[list[PauliString]]:
    return [[h.terms[i].string for i in grp] for grp in grouping.groups]


def render_edge_list(g: Graph) -> str:
    lines = [f"# vertices {g.n_vertices}"]
    lines += [f"{i} {j}" for i, j in g.sorted_edges()]
    return "\n".join(lines) + "\n"


def parse_edge_list(text: str) -> Graph:
    n = None
    edges = []
    for line in text.splitlines():
        line = line.strip()
        if not line:
            continue
        if line.startswith("#"):
            parts = line[1:].split()
            if len(parts) == 2 and parts[0] == "vertices":
                n = int(parts[1])
            continue
        i, j = line.split()
        edges.append((int(i), int(j)))
    if n is None:
        raise ValueError("missing '# vertices <n>' header")
    return Graph.from_edges(n, edges)
