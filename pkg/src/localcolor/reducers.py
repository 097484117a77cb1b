"""Reducers, hollow components and closed-neighbourhood certificates.

A c-reducer is a (c-1)-clique C joined to a disjoint stable set S', with C
having no neighbours outside C ∪ S'.  Deleting C and contracting S' to one
vertex preserves c-colorability in both directions, and a c-coloring of the
reduced graph lifts back: S' takes the new vertex's color and C takes the
other c-1 colors.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from typing import Optional

import networkx as nx

from .coloring import _extend_components, plan_dense_extension
from .errors import BudgetExceeded, PreconditionError
from .exact import DEFAULT_BUDGET, dsatur_colorable, plain_colorable
from .graph import Graph, PartialColoring, greedy_complement_matching, improper_edges, k_delta
from .listcolor import extend
from .sim import RoundStats, seed_key


@dataclass(frozen=True)
class ReducerSpec:
    clique: tuple
    stable: tuple
    component_id: Optional[int] = None

    @property
    def vertices(self) -> frozenset:
        return frozenset(self.clique) | frozenset(self.stable)


def _is_reducer(g: Graph, clique, stable, c: int) -> bool:
    sets = g.neighbor_sets()
    C, S = set(clique), set(stable)
    if len(C) != c - 1 or not S or C & S:
        return False
    D = C | S
    for v in C:
        if not (C - {v}) <= sets[v] or not S <= sets[v] or not sets[v] <= D:
            return False
    return all(not (sets[v] & S) for v in S)


def detect_reducer(g: Graph, component, c: int, component_id=None) -> Optional[ReducerSpec]:
    """Test whether ``component`` is exactly a c-reducer.

    C is taken as the vertices whose closed neighbourhood is exactly the
    component, S' as the rest; the definition is then checked literally.
    (Vertices of S' without outside neighbours also have their neighbourhood
    inside the component, so that alone does not pick out C.)
    """
    comp = sorted(set(component))
    sets = g.neighbor_sets()
    members = frozenset(comp)
    clique = tuple(v for v in comp if sets[v] | {v} == members)
    stable = tuple(v for v in comp if v not in set(clique))
    if _is_reducer(g, clique, stable, c):
        return ReducerSpec(clique, stable, component_id)
    return None


def external_neighbors(g: Graph, r: ReducerSpec) -> frozenset:
    """Vertices outside the reducer adjacent to some vertex of S'."""
    sets = g.neighbor_sets()
    D = r.vertices
    out = set()
    for v in r.stable:
        out |= sets[v]
    return frozenset(out - D)


def is_deletable(g: Graph, r: ReducerSpec, c: int) -> bool:
    """Fewer than c vertices outside the reducer see S'."""
    return len(external_neighbors(g, r)) < c


@dataclass
class Reduction:
    """Back-mapping of a simultaneous reduction of disjoint reducers."""

    graph: Graph
    to_r: dict  # vertex of g outside every reducer -> vertex of R
    new_vertices: tuple  # R vertex standing for each reducer's S'
    reducers: tuple
    c: int

    def lift(self, r_coloring, c: Optional[int] = None) -> PartialColoring:
        """Turn a total c-coloring of R into one of the original graph."""
        c = c or self.c
        colors = r_coloring.colors if isinstance(r_coloring, PartialColoring) else r_coloring
        out = {v: colors[x] for v, x in self.to_r.items()}
        for spec, x in zip(self.reducers, self.new_vertices):
            mine = colors[x]
            for v in spec.stable:
                out[v] = mine
            others = [col for col in range(1, c + 1) if col != mine]
            for v, col in zip(spec.clique, others):
                out[v] = col
        return PartialColoring(out, c)


def reduce_all(g: Graph, reducers, c: Optional[int] = None) -> Reduction:
    """Delete every reducer clique and contract each S' into one new vertex.

    Kept vertices are renumbered in ascending order; the new vertices
    follow, one per reducer in the given order.
    """
    reducers = tuple(reducers)
    used = set()
    for r in reducers:
        if used & r.vertices:
            raise PreconditionError("reducers must be disjoint")
        used |= r.vertices
    if c is None:
        c = len(reducers[0].clique) + 1 if reducers else 1
    keep = [v for v in g.vertices() if v not in used]
    to_r = {v: i + 1 for i, v in enumerate(keep)}
    new = tuple(len(keep) + j + 1 for j in range(len(reducers)))
    where = {}
    for r, x in zip(reducers, new):
        for v in r.stable:
            where[v] = x
    n = len(keep) + len(reducers)
    adj = [set() for _ in range(n + 1)]
    for u, v in g.edges():
        a = to_r.get(u, where.get(u))
        b = to_r.get(v, where.get(v))
        if a is None or b is None or a == b:
            continue
        adj[a].add(b)
        adj[b].add(a)
    h = Graph(n, [()] + [tuple(sorted(s)) for s in adj[1:]], _trusted=True)
    return Reduction(h, to_r, new, reducers, c)


def reduce(g: Graph, r: ReducerSpec):
    """Reduction with respect to one reducer: ``(R, back_mapping)``."""
    red = reduce_all(g, [r], len(r.clique) + 1)
    return red.graph, red


def extend_over_reducers(g: Graph, reducers, outer: PartialColoring, c: int, seed=0,
                         max_rounds: int = 2_000, stats: Optional[RoundStats] = None
                         ) -> PartialColoring:
    """Extend a c-coloring of G minus the reducers to all of G.

    Every reducer must be deletable.  The contracted vertices have degree
    at most c-1 in the reduced graph, so one list-coloring call colors them.
    """
    reducers = list(reducers)
    for r in reducers:
        if len(r.clique) != c - 1 or not _is_reducer(g, r.clique, r.stable, c):
            raise PreconditionError(f"{r} is not a {c}-reducer of g")
        if not is_deletable(g, r, c):
            raise PreconditionError(f"reducer with clique {r.clique[:3]}... is not deletable")
    covered = set()
    for r in reducers:
        covered |= r.vertices
    rest = [v for v in g.vertices() if v not in covered]
    missing = [v for v in rest if v not in outer]
    if missing:
        raise PreconditionError(f"outer coloring misses vertex {missing[0]}")
    if any(v in covered for v in outer.colors):
        raise PreconditionError("outer coloring colors reducer vertices")
    bad = improper_edges(g, outer)
    if bad:
        raise PreconditionError(f"outer coloring is improper on edge {bad[0]}")
    red = reduce_all(g, reducers, c)
    colored = PartialColoring({red.to_r[v]: col for v, col in outer.colors.items()}, c)
    out, st, _ = extend(red.graph, colored, c, 1, seed=("reducers", seed),
                        vertices=red.new_vertices, max_rounds=max_rounds, stage="reducers",
                        phase="reducer-extension")
    if stats is not None:
        stats.absorb(st)
    return red.lift(out, c)


def plant_reducers(host_n: int, host_degree: int, c: int, count: int, stable_size: int,
                   attach: int, seed=0):
    """Random host graph with ``count`` planted deletable c-reducers.

    Each reducer's S' vertices see ``attach`` (< c) distinct host vertices in
    total.  Returns ``(g, reducers)``; host vertices come first.
    """
    if attach >= c:
        raise ValueError("attach must be < c for the reducers to be deletable")
    rng = random.Random(seed_key(("reducers", host_n, host_degree, c, count, stable_size,
                                  attach, seed)))
    edges = set()
    deg = [0] * (host_n + 1)
    for _ in range(host_n * host_degree):
        u, v = rng.randint(1, host_n), rng.randint(1, host_n)
        if u != v and deg[u] < host_degree and deg[v] < host_degree:
            e = (min(u, v), max(u, v))
            if e not in edges:
                edges.add(e)
                deg[u] += 1
                deg[v] += 1
    n = host_n
    specs = []
    for _ in range(count):
        stable = list(range(n + 1, n + stable_size + 1))
        clique = list(range(n + stable_size + 1, n + stable_size + c))
        n += stable_size + c - 1
        for i, a in enumerate(clique):
            for b in clique[i + 1:]:
                edges.add((a, b))
            for s in stable:
                edges.add((s, a))
        seen = rng.sample(range(1, host_n + 1), min(attach, host_n))
        for j, h in enumerate(seen):
            edges.add((h, stable[j % len(stable)]))
        for s in stable:
            if rng.random() < 0.5 and seen:
                edges.add((rng.choice(seen), s))
        specs.append(ReducerSpec(tuple(clique), tuple(stable), len(specs)))
    g = Graph.from_edges(n, [(min(a, b), max(a, b)) for a, b in edges])
    return g, specs


# -- hollow components -------------------------------------------------------------


def max_complement_matching(g: Graph, component) -> int:
    """Size of a maximum matching in the complement of g[component]."""
    comp = sorted(set(component))
    sets = g.neighbor_sets()
    h = nx.Graph()
    h.add_nodes_from(comp)
    for i, u in enumerate(comp):
        for w in comp[i + 1:]:
            if w not in sets[u]:
                h.add_edge(u, w)
    return len(nx.max_weight_matching(h, maxcardinality=True))


def detect_hollow(g: Graph, component, threshold) -> bool:
    """True iff the complement of g[component] has a matching of at least ``threshold`` pairs.

    The greedy maximal matching decides most cases (it is at least half a
    maximum matching); the rest go to an exact maximum matching.
    """
    if threshold <= 0:
        return True
    greedy = len(greedy_complement_matching(g, component))
    if greedy >= threshold:
        return True
    if 2 * greedy < threshold:
        return False
    return max_complement_matching(g, component) >= threshold


@dataclass
class HollowResult:
    coloring: PartialColoring
    stages: list
    stats: RoundStats
    breaches: list = field(default_factory=list)


def extend_over_hollow(g: Graph, dec, hollow_ids, outer: PartialColoring, c: int, k_equiv: int,
                       seed=0, required_slack: int = 1, max_rounds: int = 2_000) -> HollowResult:
    """Color the hollow components with the same five stages as the dense extension."""
    hollow_ids = sorted(hollow_ids)
    hollow = set()
    for i in hollow_ids:
        hollow |= set(dec.components[i])
    missing = [v for v in g.vertices() if v not in hollow and v not in outer]
    if missing:
        raise PreconditionError(f"outer coloring misses vertex {missing[0]}")
    bad = improper_edges(g, outer)
    if bad:
        raise PreconditionError(f"outer coloring is improper on edge {bad[0]}")
    stats = RoundStats()
    if not hollow_ids:
        return HollowResult(outer.copy(c), [], stats)
    plans = [plan_dense_extension(g, dec.components[i], k_equiv, component_id=i)
             for i in hollow_ids]
    breaches = [b for p in plans for b in p.breaches]
    out, stages = _extend_components(g, plans, outer, c, seed, stats, required_slack,
                                     max_rounds, label="hollow")
    return HollowResult(out, stages, stats, breaches)


# -- certificates --------------------------------------------------------------------


@dataclass
class Certificate:
    vertex: int
    vertices: tuple  # closed neighbourhood, original ids
    edges: tuple  # edges of the induced subgraph, original ids
    c: int
    nodes: int

    def to_json(self) -> str:
        return json.dumps({"vertex": self.vertex, "vertices": list(self.vertices),
                           "edges": [list(e) for e in self.edges], "c": self.c,
                           "nodes": self.nodes}, sort_keys=True)

    def subgraph(self) -> Graph:
        index = {v: i + 1 for i, v in enumerate(self.vertices)}
        return Graph.from_edges(len(self.vertices),
                                [(index[a], index[b]) for a, b in self.edges],
                                labels=self.vertices)


def certify_non_colorable(g: Graph, c: int, budget: int = DEFAULT_BUDGET) -> Optional[Certificate]:
    """First vertex whose closed neighbourhood is not c-colorable, as a certificate.

    Each certificate is re-checked with an independent solver before it is
    returned.
    """
    if c < 1:
        raise ValueError("c must be >= 1")
    for v in g.vertices():
        ball = sorted({v, *g.neighbors(v)})
        if len(ball) <= c:
            continue
        sub = g.induced(ball)
        try:
            res = dsatur_colorable(sub, c, budget)
        except BudgetExceeded as exc:
            raise BudgetExceeded(f"closed neighbourhood of {v}: {exc}", vertex=v,
                                 nodes=exc.nodes) from None
        if res.colorable:
            continue
        if plain_colorable(sub, c, budget).colorable:
            raise AssertionError(f"solvers disagree on the neighbourhood of {v}")
        edges = tuple((ball[a - 1], ball[b - 1]) for a, b in sub.edges())
        return Certificate(v, tuple(ball), edges, c, res.nodes)
    return None


def certificate_hypotheses(g: Graph, c: int) -> dict:
    """Which hypotheses of the local-certificate converse hold for (g, c)."""
    delta = g.delta
    if delta < 2:
        return {"delta": delta, "c_at_least_delta_minus_k_plus_1": True, "k_delta": None}
    kd = k_delta(delta)
    return {"delta": delta, "k_delta": kd, "c_at_least_delta_minus_k_plus_1": c >= delta - kd + 1}
