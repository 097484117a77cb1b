"""Seeded random graph families used by the tests, benchmarks and CLI.

They are testbeds with known structure.
Every generator is a pure function of its arguments.
"""

from __future__ import annotations

import random

from .graph import Graph
from .sim import seed_key


def _rng(kind: str, *args) -> random.Random:
    return random.Random(seed_key((kind,) + args))


class _Builder:
    def __init__(self, n: int, cap):
        self.n = n
        self.adj = [set() for _ in range(n + 1)]
        self.cap = cap if callable(cap) else (lambda v, c=cap: c)

    def room(self, v) -> bool:
        return len(self.adj[v]) < self.cap(v)

    def add(self, u, v, triangle_free=False) -> bool:
        if u == v or v in self.adj[u] or not self.room(u) or not self.room(v):
            return False
        if triangle_free and self.adj[u] & self.adj[v]:
            return False
        self.adj[u].add(v)
        self.adj[v].add(u)
        return True

    def graph(self) -> Graph:
        return Graph(self.n, [()] + [tuple(sorted(a)) for a in self.adj[1:]])


def random_regularish(n: int, delta: int, seed=0) -> Graph:
    """Union of ``delta`` random perfect matchings; duplicates and over-cap edges are dropped."""
    if n < 0 or delta < 0:
        raise ValueError("n and delta must be non-negative")
    rng = _rng("regularish", n, delta, seed)
    b = _Builder(n, delta)
    order = list(range(1, n + 1))
    for _ in range(delta):
        rng.shuffle(order)
        for i in range(0, n - 1, 2):
            b.add(order[i], order[i + 1])
    return b.graph()


def clique_union(count: int, size: int) -> Graph:
    """Disjoint copies of K_size, vertices numbered block by block."""
    edges = []
    for c in range(count):
        base = c * size
        edges += [(base + i, base + j) for i in range(1, size + 1) for j in range(i + 1, size + 1)]
    return Graph.from_edges(count * size, edges)


def planted_clusters(n: int, delta: int, clusters: int, seed=0, missing: int = 3,
                     shrink: int = 2, noise: int = 2) -> Graph:
    """Near-cliques on ``delta + 1 - shrink`` vertices plus sparse noise, max degree ``delta``.

    Each cluster loses ``missing`` random internal edges.  Non-cluster vertices
    get a random graph of degree about ``delta // 4``; cluster vertices take
    at most ``noise`` extra edges.
    """
    rng = _rng("planted", n, delta, clusters, seed, missing, shrink, noise)
    size = delta + 1 - shrink
    if clusters * size > n:
        raise ValueError("clusters do not fit into n vertices")
    ids = list(range(1, n + 1))
    rng.shuffle(ids)
    member = {}
    for c in range(clusters):
        for v in ids[c * size:(c + 1) * size]:
            member[v] = c
    b = _Builder(n, delta)
    for c in range(clusters):
        block = sorted(ids[c * size:(c + 1) * size])
        pairs = [(u, w) for i, u in enumerate(block) for w in block[i + 1:]]
        drop = set(rng.sample(range(len(pairs)), min(missing, len(pairs))))
        for j, (u, w) in enumerate(pairs):
            if j not in drop:
                b.add(u, w)
    extra = {v: 0 for v in member}
    loose = [v for v in range(1, n + 1) if v not in member]
    for v in loose:
        for _ in range(delta // 8):
            u = rng.randint(1, n)
            if u in member:
                if extra[u] >= noise:
                    continue
                if b.add(u, v):
                    extra[u] += 1
            else:
                b.add(u, v)
    return b.graph()


def triangle_free_with_hubs(n: int, delta: int, hubs: int, base_degree: int,
                            hub_links: int = 3, seed=0) -> Graph:
    """Triangle-free graph: ``hubs`` vertices of degree ``delta`` over a sparse base.

    Hubs are vertices 1..hubs.  They are first linked to about ``hub_links``
    other hubs, then filled up to degree ``delta`` from the base; base vertices
    have degree at most ``base_degree``.  Every edge that would close a
    triangle is rejected.
    """
    if hubs > n:
        raise ValueError("more hubs than vertices")
    rng = _rng("hubs", n, delta, hubs, base_degree, hub_links, seed)
    b = _Builder(n, lambda v: delta if v <= hubs else base_degree)
    hub_ids = list(range(1, hubs + 1))
    for h in hub_ids:
        tries = 0
        while sum(1 for u in b.adj[h] if u <= hubs) < hub_links and tries < 20 * hubs:
            tries += 1
            u = rng.choice(hub_ids)
            if sum(1 for w in b.adj[u] if w <= hubs) < hub_links:
                b.add(h, u, triangle_free=True)
    base = list(range(hubs + 1, n + 1))
    for h in hub_ids:
        tries = 0
        while b.room(h) and tries < 50 * delta:
            tries += 1
            b.add(h, rng.choice(base), triangle_free=True)
    for _ in range(base_degree * len(base)):
        u, v = rng.choice(base), rng.choice(base)
        b.add(u, v, triangle_free=True)
    return b.graph()


def complete_minus_matching(delta: int) -> Graph:
    """K_{Δ+1} minus the maximum matching {1,2},{3,4},...; vertex Δ+1 is unmatched when Δ is even."""
    size = delta + 1
    edges = [(i, j) for i in range(1, size + 1) for j in range(i + 1, size + 1)
             if not (i % 2 == 1 and j == i + 1)]
    return Graph.from_edges(size, edges)


def random_small_graph(n: int, p: float, seed=0) -> Graph:
    """G(n, p) for exhaustive small-scale checks."""
    rng = _rng("gnp", n, p, seed)
    edges = [(u, v) for u in range(1, n + 1) for v in range(u + 1, n + 1) if rng.random() < p]
    return Graph.from_edges(n, edges)
