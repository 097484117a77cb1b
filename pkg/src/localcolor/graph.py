"""Graph representation, I/O, and the combinatorial primitives used everywhere.

Vertices are the integers ``1..n``.  Adjacency is stored as sorted tuples so
iteration order is always ascending id, which is what makes seeded runs
reproducible.
"""

from __future__ import annotations

import json
import math
from bisect import bisect_left
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, Optional

from .errors import BudgetExceeded, GraphFormatError, UnknownVertexError

DEFAULT_CLIQUE_BUDGET = 10**7


class Graph:
    """Immutable simple undirected graph on vertices ``1..n``.

    ``labels`` optionally records, for each vertex, the id it had in a parent
    graph (used for induced subgraphs, balls and certificates).
    """

    __slots__ = ("n", "_adj", "delta", "m", "labels", "_sets")

    def __init__(self, n: int, adjacency, labels=None, _trusted=False):
        if n < 0:
            raise ValueError("n must be non-negative")
        self.n = n
        if _trusted:
            adj = adjacency
        else:
            adj = [()] * (n + 1)
            for v in range(1, n + 1):
                row = sorted(set(adjacency[v]))
                for u in row:
                    if u == v:
                        raise GraphFormatError(f"self-loop at vertex {v}")
                    if not 1 <= u <= n:
                        raise UnknownVertexError(u)
                adj[v] = tuple(row)
            for v in range(1, n + 1):
                for u in adj[v]:
                    if not _contains(adj[u], v):
                        raise ValueError(f"adjacency not symmetric on edge {v}-{u}")
        self._adj = adj
        self.delta = max((len(adj[v]) for v in range(1, n + 1)), default=0)
        self.m = sum(len(adj[v]) for v in range(1, n + 1)) // 2
        if labels is not None:
            labels = tuple(labels)
            if len(labels) != n:
                raise ValueError("labels must have one entry per vertex")
        self.labels = labels
        self._sets = None

    @classmethod
    def from_edges(cls, n: int, edges: Iterable, labels=None) -> "Graph":
        rows = [set() for _ in range(n + 1)]
        for u, v in edges:
            u, v = int(u), int(v)
            if u == v:
                raise GraphFormatError(f"self-loop at vertex {u}")
            if not (1 <= u <= n and 1 <= v <= n):
                raise UnknownVertexError(u if not 1 <= u <= n else v)
            rows[u].add(v)
            rows[v].add(u)
        adj = [()] + [tuple(sorted(r)) for r in rows[1:]]
        return cls(n, adj, labels=labels, _trusted=True)

    # -- queries -----------------------------------------------------------

    def vertices(self) -> range:
        return range(1, self.n + 1)

    def _check(self, v):
        if not (isinstance(v, int) and 1 <= v <= self.n):
            raise UnknownVertexError(v)

    def neighbors(self, v: int) -> tuple:
        self._check(v)
        return self._adj[v]

    def degree(self, v: int) -> int:
        self._check(v)
        return len(self._adj[v])

    def has_edge(self, u: int, v: int) -> bool:
        self._check(u)
        self._check(v)
        return _contains(self._adj[u], v)

    def neighbor_sets(self) -> list:
        """Per-vertex frozensets (index 0 unused); built once and cached."""
        if self._sets is None:
            self._sets = [frozenset(row) for row in self._adj]
        return self._sets

    def edges(self) -> Iterator[tuple]:
        for u in range(1, self.n + 1):
            for v in self._adj[u]:
                if v > u:
                    yield (u, v)

    def label(self, v: int) -> int:
        return v if self.labels is None else self.labels[v - 1]

    def induced(self, vertices: Iterable[int]) -> "Graph":
        """Induced subgraph, relabelled ``1..k`` in ascending order of ``vertices``.

        The result's ``labels`` hold the original ids (composed with this
        graph's labels if it has any).
        """
        keep = sorted(set(vertices))
        for v in keep:
            self._check(v)
        index = {v: i + 1 for i, v in enumerate(keep)}
        adj = [()]
        for v in keep:
            adj.append(tuple(index[u] for u in self._adj[v] if u in index))
        return Graph(len(keep), adj, labels=[self.label(v) for v in keep], _trusted=True)

    def without_edge(self, u: int, v: int) -> "Graph":
        if not self.has_edge(u, v):
            raise ValueError(f"no edge {u}-{v}")
        adj = list(self._adj)
        adj[u] = tuple(x for x in adj[u] if x != v)
        adj[v] = tuple(x for x in adj[v] if x != u)
        return Graph(self.n, adj, labels=self.labels, _trusted=True)

    def __eq__(self, other):
        if not isinstance(other, Graph):
            return NotImplemented
        return self.n == other.n and self._adj == other._adj

    def __hash__(self):
        return hash((self.n, tuple(self._adj)))

    def __repr__(self):
        return f"Graph(n={self.n}, m={self.m}, delta={self.delta})"


def _contains(row, x) -> bool:
    i = bisect_left(row, x)
    return i < len(row) and row[i] == x


# -- colorings and matchings --------------------------------------------------


@dataclass
class PartialColoring:
    """Vertex -> color map with colors drawn from ``1..palette``.

    Uncolored vertices are simply absent from ``colors``.
    """

    colors: dict = field(default_factory=dict)
    palette: Optional[int] = None

    def __post_init__(self):
        self.colors = {int(v): int(c) for v, c in self.colors.items() if c is not None}
        if self.palette is not None:
            for v, c in self.colors.items():
                if not 1 <= c <= self.palette:
                    raise ValueError(f"color {c} of vertex {v} outside 1..{self.palette}")

    def get(self, v):
        return self.colors.get(v)

    def __contains__(self, v):
        return v in self.colors

    def __len__(self):
        return len(self.colors)

    def copy(self, palette=None) -> "PartialColoring":
        return PartialColoring(dict(self.colors), self.palette if palette is None else palette)

    def is_total(self, g: Graph) -> bool:
        return len(self.colors) == g.n and all(v in self.colors for v in g.vertices())

    def max_color(self) -> int:
        return max(self.colors.values(), default=0)

    def restrict(self, vertices) -> "PartialColoring":
        vs = set(vertices)
        return PartialColoring({v: c for v, c in self.colors.items() if v in vs}, self.palette)


def is_proper(g: Graph, coloring) -> bool:
    """True iff no edge has both endpoints colored identically."""
    colors = coloring.colors if isinstance(coloring, PartialColoring) else coloring
    for u, v in g.edges():
        cu = colors.get(u)
        if cu is not None and cu == colors.get(v):
            return False
    return True


def improper_edges(g: Graph, coloring) -> list:
    colors = coloring.colors if isinstance(coloring, PartialColoring) else coloring
    return [
        (u, v) for u, v in g.edges()
        if colors.get(u) is not None and colors.get(u) == colors.get(v)
    ]


@dataclass(frozen=True)
class Matching:
    """Disjoint vertex pairs; ``complement`` says the pairs are non-edges of ``g``."""

    pairs: tuple
    complement: bool = True

    @classmethod
    def build(cls, g: Graph, pairs, complement=True) -> "Matching":
        seen = set()
        out = []
        for u, v in pairs:
            if u in seen or v in seen or u == v:
                raise ValueError(f"pair ({u}, {v}) is not disjoint from the others")
            seen.update((u, v))
            if g.has_edge(u, v) == complement:
                kind = "non-adjacent" if complement else "adjacent"
                raise ValueError(f"pair ({u}, {v}) is not {kind} in g")
            out.append((u, v))
        return cls(tuple(out), complement)

    def __len__(self):
        return len(self.pairs)

    def endpoints(self) -> frozenset:
        return frozenset(x for p in self.pairs for x in p)


# -- I/O -------------------------------------------------------------------------


def load_graph(source: str) -> Graph:
    """Parse an edge list.

    Format: optional ``p <n> <m>`` header (a DIMACS ``p edge n m`` header and
    ``e u v`` lines are accepted too), then one ``u v`` pair per line; ``#``
    and ``c`` start comments.  With a header, ids must lie in ``1..n``.
    Without one, ids are arbitrary integers renumbered ``1..n`` in ascending
    order and the originals kept as labels.
    """
    n = None
    declared_m = None
    raw = []
    for lineno, line in enumerate(source.splitlines(), start=1):
        text = line.strip()
        if not text or text.startswith("#") or text.startswith("c ") or text == "c":
            continue
        parts = text.split()
        if parts[0] == "p":
            if n is not None:
                raise GraphFormatError("duplicate header", lineno)
            nums = [p for p in parts[1:] if p.lstrip("-").isdigit()]
            if len(nums) != 2:
                raise GraphFormatError(f"malformed header {text!r}", lineno)
            n, declared_m = int(nums[0]), int(nums[1])
            if n < 0 or declared_m < 0:
                raise GraphFormatError("negative sizes in header", lineno)
            continue
        if parts[0] == "e":
            parts = parts[1:]
        if len(parts) != 2:
            raise GraphFormatError(f"expected '<u> <v>', got {text!r}", lineno)
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError:
            raise GraphFormatError(f"non-integer vertex in {text!r}", lineno) from None
        if u == v:
            raise GraphFormatError(f"self-loop at vertex {u}", lineno)
        if n is not None and not (1 <= u <= n and 1 <= v <= n):
            raise GraphFormatError(f"vertex outside 1..{n} in {text!r}", lineno)
        raw.append((u, v))
    if n is not None:
        return Graph.from_edges(n, raw)
    ids = sorted({x for e in raw for x in e})
    index = {x: i + 1 for i, x in enumerate(ids)}
    labels = None if ids == list(range(1, len(ids) + 1)) else ids
    return Graph.from_edges(len(ids), [(index[u], index[v]) for u, v in raw], labels=labels)


def save_graph(g: Graph) -> str:
    lines = [f"p {g.n} {g.m}"]
    lines.extend(f"{u} {v}" for u, v in g.edges())
    return "\n".join(lines) + "\n"


def graph_to_json(g: Graph) -> dict:
    return {"n": g.n, "edges": [list(e) for e in g.edges()]}


def graph_from_json(data) -> Graph:
    if isinstance(data, str):
        data = json.loads(data)
    try:
        n = int(data["n"])
        edges = data["edges"]
    except (KeyError, TypeError) as exc:
        raise GraphFormatError(f"JSON graph needs 'n' and 'edges': {exc}") from None
    return Graph.from_edges(n, [tuple(e) for e in edges])


def read_graph_file(path) -> Graph:
    with open(path) as fh:
        text = fh.read()
    if text.lstrip().startswith("{"):
        return graph_from_json(text)
    return load_graph(text)


# -- numeric helpers -------------------------------------------------------------------


def k_delta(delta: int) -> int:
    """Largest k with ``(k+1)(k+2) <= delta``; equals floor(sqrt(delta+1/4) - 3/2)."""
    if delta < 2:
        raise ValueError("k_delta needs delta >= 2")
    # floor((sqrt(4*delta+1) - 3) / 2) == floor((isqrt(4*delta+1) - 3) / 2)
    return (math.isqrt(4 * delta + 1) - 3) // 2


# -- neighbourhood primitives ---------------------------------------------------------


def edges_within(g: Graph, vertices) -> int:
    """Number of edges of ``g`` with both ends in ``vertices``."""
    vs = vertices if isinstance(vertices, (set, frozenset)) else set(vertices)
    sets = g.neighbor_sets()
    return sum(len(sets[u] & vs) for u in vs) // 2


def non_adjacent_pairs_in_neighborhood(g: Graph, v: int, restrict=None) -> int:
    """Unordered non-adjacent pairs inside ``N(v)`` (optionally ``N(v) ∩ restrict``)."""
    nbrs = set(g.neighbors(v))
    if restrict is not None:
        nbrs &= set(restrict)
    k = len(nbrs)
    return k * (k - 1) // 2 - edges_within(g, nbrs)


def greedy_complement_matching(g: Graph, s) -> Matching:
    """Maximal matching of the complement of ``g[s]`` by ascending-id greedy.

    Each unmatched vertex, in increasing id order, is paired with the
    smallest-id unmatched vertex of ``s`` it is not adjacent to.
    """
    order = sorted(set(s))
    sets = g.neighbor_sets()
    free = list(order)
    matched = set()
    pairs = []
    for u in order:
        if u in matched:
            continue
        nu = sets[u]
        for w in free:
            if w != u and w not in matched and w not in nu:
                pairs.append((u, w))
                matched.update((u, w))
                break
        free = [w for w in free if w not in matched]
    return Matching(tuple(pairs), True)


def find_clique_above(g: Graph, threshold: int, budget: int = DEFAULT_CLIQUE_BUDGET):
    """Search every closed neighbourhood for a clique with more than ``threshold`` vertices.

    Returns ``(v, clique)`` for the smallest-id vertex whose closed
    neighbourhood holds such a clique, or None.  The clique found is grown
    greedily (ascending id) to a maximal clique of ``N[v]``.  Raises ``BudgetExceeded``
    naming the neighbourhood when a single search exceeds ``budget`` nodes.
    """
    if threshold < 1:
        raise ValueError("threshold must be >= 1")
    target = threshold + 1
    for v in g.vertices():
        if g.degree(v) + 1 < target:
            continue
        clique = _clique_in_closed_neighborhood(g, v, target, budget)
        if clique is not None:
            return v, frozenset(_grow_clique(g, v, clique))
    return None


def _grow_clique(g, v, clique):
    sets = g.neighbor_sets()
    members = set(clique)
    for u in g.neighbors(v):
        if u not in members and all(w in sets[u] for w in members):
            members.add(u)
    return members


def _clique_in_closed_neighborhood(g, v, target, budget):
    nbrs = g.neighbors(v)
    sets = g.neighbor_sets()
    # prune neighbours that cannot sit in a clique of the target size
    cand = [u for u in nbrs if len(sets[u] & sets[v]) + 2 >= target]
    index = {u: i for i, u in enumerate(cand)}
    masks = []
    for u in cand:
        m = 0
        for w in sets[u]:
            j = index.get(w)
            if j is not None:
                m |= 1 << j
        masks.append(m)
    found = _clique_search(masks, (1 << len(cand)) - 1, target - 1, budget, v)
    if found is None:
        return None
    return [v] + [cand[i] for i in found]


def _clique_search(masks, pool, need, budget, vertex):
    """Find ``need`` pairwise-adjacent indices inside bitmask ``pool``.

    Branch and bound with a greedy colouring bound.
    """
    counter = [0]

    def color_bound(p):
        # greedy colour classes; returns order and bounds as in MCQ
        order, bounds = [], []
        color = 0
        rest = p
        while rest:
            color += 1
            q = rest
            while q:
                low = q & -q
                i = low.bit_length() - 1
                q &= ~masks[i]
                q &= ~low
                rest &= ~low
                order.append(i)
                bounds.append(color)
        return order, bounds

    def expand(chosen, p):
        counter[0] += 1
        if counter[0] > budget:
            raise BudgetExceeded(
                f"clique search around vertex {vertex} exceeded {budget} nodes",
                vertex=vertex, nodes=counter[0],
            )
        if len(chosen) >= need:
            return chosen
        order, bounds = color_bound(p)
        for idx in range(len(order) - 1, -1, -1):
            if len(chosen) + bounds[idx] < need:
                return None
            i = order[idx]
            res = expand(chosen + [i], p & masks[i])
            if res is not None:
                return res
            p &= ~(1 << i)
        return None

    if need <= 0:
        return []
    return expand([], pool)


def max_clique(g: Graph, budget: int = DEFAULT_CLIQUE_BUDGET) -> frozenset:
    """Exact maximum clique of the whole graph (small graphs only)."""
    best = frozenset([1]) if g.n else frozenset()
    size = len(best)
    while True:
        hit = None if size >= g.n else _whole_graph_clique(g, size + 1, budget)
        if hit is None:
            return best
        best = frozenset(hit)
        size = len(best)


def _whole_graph_clique(g, target, budget):
    sets = g.neighbor_sets()
    masks = []
    for v in g.vertices():
        m = 0
        for u in sets[v]:
            m |= 1 << (u - 1)
        masks.append(m)
    found = _clique_search(masks, (1 << g.n) - 1, target, budget, None)
    return None if found is None else [i + 1 for i in found]


def coloring_from_mapping(mapping: Mapping, palette=None) -> PartialColoring:
    return PartialColoring(dict(mapping), palette)
