"""The layered chain G_i that is not c-colorable, and its c-colorable one-edge deletion.

G_1 is K_{c+1}.  Step j removes the lowest-id vertex of the previous clique
layer, adds a stable set S_j of Δ-c+2 vertices and a (c-1)-clique C_j joined
to all of S_j, and hands the removed vertex's edges to S_j round-robin.
Since every step is performed identically, interior layers look alike, and
a ball that does not reach the deleted edge cannot tell G_i from G.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass

import networkx as nx

from .errors import PreconditionError
from .graph import Graph, k_delta
from .reducers import ReducerSpec
from .sim import ball_vertices


def valid_parameters(delta: int, c: int):
    """``(ok, reason)``: can the chain be built with max degree ``delta`` and ``c`` colors?

    The construction needs (Δ-c+2)(Δ-c+1) >= Δ, which is the same as c <=
    Δ-k_Δ-1, or c = Δ-k_Δ with Δ = (k_Δ+1)(k_Δ+2).
    """
    if delta < 3 or c < 3:
        return False, "need delta >= 3 and c >= 3"
    if c > delta:
        return False, f"c={c} exceeds delta={delta}"
    s = delta - c + 2
    if s * (s - 1) >= delta:
        kd = k_delta(delta)
        return True, f"(Δ-c+2)(Δ-c+1)={s * (s - 1)} >= Δ={delta} (k_Δ={kd})"
    return False, f"(Δ-c+2)(Δ-c+1)={s * (s - 1)} < Δ={delta}"


@dataclass
class LayeredGraph:
    graph: Graph
    layer_of: dict
    role_of: dict  # "clique" or "stable"
    removed: tuple  # original construction ids of v_1, v_2, ...
    delta: int
    c: int
    layers: int

    def layer(self, j: int) -> tuple:
        return tuple(v for v in self.graph.vertices() if self.layer_of[v] == j)

    def clique(self, j: int) -> tuple:
        return tuple(v for v in self.layer(j) if self.role_of[v] == "clique")

    def stable(self, j: int) -> tuple:
        return tuple(v for v in self.layer(j) if self.role_of[v] == "stable")

    def top_reducer(self) -> ReducerSpec:
        """The last layer, (C_i, S_i), which is a c-reducer when i >= 2."""
        if self.layers < 2:
            raise PreconditionError("G_1 has no reducer")
        return ReducerSpec(self.clique(self.layers), self.stable(self.layers), self.layers)

    def annotation(self) -> str:
        return json.dumps({
            "delta": self.delta, "c": self.c, "layers": self.layers,
            "layer_of": {str(v): self.layer_of[v] for v in self.graph.vertices()},
            "role_of": {str(v): self.role_of[v] for v in self.graph.vertices()},
        }, sort_keys=True)


def build_chain(delta: int, c: int, i: int) -> LayeredGraph:
    """G_i; ids run layer by layer, S_j before C_j, with removed vertices squeezed out."""
    ok, reason = valid_parameters(delta, c)
    if not ok:
        raise PreconditionError(f"invalid parameters: {reason}")
    if i < 1:
        raise PreconditionError("i must be >= 1")
    adj: dict = {}
    layer = {}
    role = {}
    first = list(range(1, c + 2))
    for v in first:
        adj[v] = set(first) - {v}
        layer[v] = 1
        role[v] = "clique"
    current_clique = first
    next_id = c + 2
    removed = []
    for j in range(2, i + 1):
        v = min(current_clique)
        removed.append(v)
        nbrs = sorted(adj.pop(v))
        for u in nbrs:
            adj[u].discard(v)
        del layer[v], role[v]
        stable = list(range(next_id, next_id + delta - c + 2))
        clique = list(range(next_id + len(stable), next_id + len(stable) + c - 1))
        next_id += len(stable) + len(clique)
        for s in stable:
            adj[s] = set(clique)
            layer[s], role[s] = j, "stable"
        for a in clique:
            adj[a] = (set(clique) - {a}) | set(stable)
            layer[a], role[a] = j, "clique"
        for t, u in enumerate(nbrs):
            s = stable[t % len(stable)]
            adj[s].add(u)
            adj[u].add(s)
        current_clique = clique
    ids = sorted(adj)
    index = {v: t + 1 for t, v in enumerate(ids)}
    rows = [()] + [tuple(sorted(index[u] for u in adj[v])) for v in ids]
    g = Graph(len(ids), rows)
    if g.delta > delta:
        raise AssertionError(f"construction exceeded Δ: {g.delta} > {delta}")
    return LayeredGraph(g, {index[v]: layer[v] for v in ids}, {index[v]: role[v] for v in ids},
                        tuple(removed), delta, c, i)


def hard_edge(chain: LayeredGraph) -> tuple:
    """Lowest edge (lexicographically) between layers i/2 and i/2 + 1."""
    i = chain.layers
    lo, hi = i // 2, i // 2 + 1
    for u, v in chain.graph.edges():
        if {chain.layer_of[u], chain.layer_of[v]} == {lo, hi}:
            return (u, v)
    raise PreconditionError(f"no edge between layers {lo} and {hi}")


def build_hard_instance(delta: int, c: int, i: int, chain: LayeredGraph = None) -> Graph:
    """G_i minus the lowest edge crossing layers i/2 and i/2 + 1."""
    if i % 2 or i < 4:
        raise PreconditionError("i must be even and at least 4")
    chain = chain or build_chain(delta, c, i)
    u, v = hard_edge(chain)
    return chain.graph.without_edge(u, v)


# -- isomorphism -----------------------------------------------------------------------


def to_networkx(g: Graph, root=None) -> nx.Graph:
    h = nx.Graph()
    for v in g.vertices():
        h.add_node(v, root=(v == root))
    h.add_edges_from(g.edges())
    return h


def isomorphic(a: Graph, b: Graph) -> bool:
    if a.n != b.n or a.m != b.m:
        return False
    if sorted(a.degree(v) for v in a.vertices()) != sorted(b.degree(v) for v in b.vertices()):
        return False
    return nx.is_isomorphic(to_networkx(a), to_networkx(b))


def _rooted_ball(g: Graph, v: int, radius: int) -> nx.Graph:
    keep = sorted(ball_vertices(g, v, radius))
    sub = g.induced(keep)
    return _twin_quotient(sub, keep.index(v) + 1)


def _twin_quotient(g: Graph, root: int) -> nx.Graph:
    """Collapse true twins (equal N[v]) and false twins (equal N(v)) into labelled nodes.

    Twin classes are modules, so two rooted graphs are isomorphic exactly when
    their quotients are (labels carry the kind, size, root flag and distance
    to the root).  Without this, VF2 wanders through the factorially many
    ways of matching the clique layers.
    """
    sets = g.neighbor_sets()
    closed = {}
    for x in g.vertices():
        closed.setdefault(sets[x] | {x}, []).append(x)
    cls = {}
    for members in closed.values():
        if len(members) > 1:
            for x in members:
                cls[x] = ("T", min(members))
    opened = {}
    for x in g.vertices():
        if x not in cls:
            opened.setdefault(sets[x], []).append(x)
    for members in opened.values():
        for x in members:
            cls[x] = ("F", min(members))
    dist = {root: 0}
    frontier = [root]
    while frontier:
        nxt = []
        for x in frontier:
            for y in sets[x]:
                if y not in dist:
                    dist[y] = dist[x] + 1
                    nxt.append(y)
        frontier = nxt
    h = nx.Graph()
    groups: dict = {}
    for x in g.vertices():
        groups.setdefault(cls[x], []).append(x)
    for key, members in groups.items():
        h.add_node(key[1], label=f"{key[0]}{len(members)}:{int(root in members)}:"
                                 f"{min(dist.get(x, -1) for x in members)}")
    for a, b in g.edges():
        ka, kb = cls[a][1], cls[b][1]
        if ka != kb:
            h.add_edge(ka, kb)
    return h


def _ball_key(h: nx.Graph) -> str:
    return nx.weisfeiler_lehman_graph_hash(h, node_attr="label", iterations=4)


def indistinguishability_report(g_hard: Graph, chain, radius: int) -> dict:
    """For each vertex of the chain, look for a rooted-isomorphic ball of the same radius in ``g_hard``."""
    if radius < 0:
        raise ValueError("radius must be >= 0")
    g_chain = chain.graph if isinstance(chain, LayeredGraph) else chain
    buckets: dict = {}
    for v in g_hard.vertices():
        h = _rooted_ball(g_hard, v, radius)
        buckets.setdefault(_ball_key(h), []).append(h)
    match = nx.algorithms.isomorphism.categorical_node_match("label", None)
    unmatched = []
    for v in g_chain.vertices():
        h = _rooted_ball(g_chain, v, radius)
        found = any(nx.is_isomorphic(h, cand, node_match=match)
                    for cand in buckets.get(_ball_key(h), ()))
        if not found:
            unmatched.append(v)
    total = g_chain.n
    return {
        "radius": radius,
        "vertices": total,
        "matched": total - len(unmatched),
        "fraction": (total - len(unmatched)) / total if total else 1.0,
        "unmatched": unmatched,
    }


def diameter(g: Graph) -> int:
    best = 0
    for s in g.vertices():
        dist = {s: 0}
        q = deque([s])
        while q:
            x = q.popleft()
            for y in g.neighbors(x):
                if y not in dist:
                    dist[y] = dist[x] + 1
                    q.append(y)
        if len(dist) < g.n:
            return -1
        best = max(best, max(dist.values()))
    return best
