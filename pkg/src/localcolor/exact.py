"""Exact c-colorability for small graphs.

Two independent solvers live here.  ``dsatur_colorable`` is the working
solver: backtracking in DSATUR order with forward checking and a Hall-style
prune over a fixed clique cover.  ``plain_colorable`` is a deliberately naive
id-order backtracker used to re-check certificates.  Both stop with
``BudgetExceeded`` rather than guess.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .errors import BudgetExceeded
from .graph import Graph, max_clique

DEFAULT_BUDGET = 2 * 10**6


@dataclass
class ColorabilityResult:
    colorable: bool
    coloring: Optional[dict]
    nodes: int


def _popcount(x: int) -> int:
    return bin(x).count("1")


def _clique_cover(g: Graph) -> list:
    """Greedy partition into cliques, larger cliques first; singletons dropped."""
    sets = g.neighbor_sets()
    left = set(g.vertices())
    cover = []
    while left:
        v = max(left, key=lambda x: (len(sets[x] & left), -x))
        clique = [v]
        cand = sets[v] & left
        while cand:
            u = max(cand, key=lambda x: (len(sets[x] & cand), -x))
            clique.append(u)
            cand &= sets[u]
        left.difference_update(clique)
        if len(clique) > 1:
            cover.append(tuple(sorted(clique)))
    return cover


def dsatur_colorable(g: Graph, c: int, budget: int = DEFAULT_BUDGET) -> ColorabilityResult:
    """Decide whether ``g`` has a proper coloring with colors ``1..c``."""
    n = g.n
    if n == 0:
        return ColorabilityResult(True, {}, 0)
    if c <= 0:
        return ColorabilityResult(False, None, 0)
    full = (1 << c) - 1
    adj = [()] + [g.neighbors(v) for v in g.vertices()]
    deg = [0] + [len(adj[v]) for v in g.vertices()]
    color = [0] * (n + 1)
    # forbidden[v]: bitmask of colours used by neighbours; cnt keeps multiplicities
    forbidden = [0] * (n + 1)
    cnt = [dict() for _ in range(n + 1)]
    cover = _clique_cover(g)
    if any(len(k) > c for k in cover):
        return ColorabilityResult(False, None, 0)
    cliques_of = [[] for _ in range(n + 1)]
    for idx, k in enumerate(cover):
        for v in k:
            cliques_of[v].append(idx)
    nodes = [0]

    def assign(v, col):
        color[v] = col
        bit = 1 << (col - 1)
        for u in adj[v]:
            d = cnt[u]
            d[col] = d.get(col, 0) + 1
            forbidden[u] |= bit

    def unassign(v, col):
        color[v] = 0
        bit = 1 << (col - 1)
        for u in adj[v]:
            d = cnt[u]
            d[col] -= 1
            if d[col] == 0:
                del d[col]
                forbidden[u] &= ~bit

    def hall_ok(touched):
        for idx in touched:
            union = 0
            free = 0
            for u in cover[idx]:
                if not color[u]:
                    free += 1
                    union |= full & ~forbidden[u]
            if free and _popcount(union) < free:
                return False
        return True

    def pick():
        best, key = 0, None
        for v in range(1, n + 1):
            if color[v]:
                continue
            k = (_popcount(forbidden[v]), deg[v], -v)
            if key is None or k > key:
                best, key = v, k
        return best

    def solve(used, remaining):
        nodes[0] += 1
        if nodes[0] > budget:
            raise BudgetExceeded(f"colorability search exceeded {budget} nodes", nodes=nodes[0])
        if remaining == 0:
            return True
        v = pick()
        avail = full & ~forbidden[v]
        if not avail:
            return False
        limit = min(c, used + 1)
        touched = set()
        for u in adj[v]:
            touched.update(cliques_of[u])
        touched.update(cliques_of[v])
        for col in range(1, limit + 1):
            if not avail >> (col - 1) & 1:
                continue
            assign(v, col)
            ok = all(
                color[u] or forbidden[u] != full for u in adj[v]
            ) and hall_ok(touched)
            if ok and solve(max(used, col), remaining - 1):
                return True
            unassign(v, col)
        return False

    # colours of one maximum-ish clique can be fixed without loss of generality
    seed_clique = max(cover, key=len) if cover else (1,)
    used = 0
    for v in seed_clique:
        used += 1
        assign(v, used)
    ok = hall_ok(range(len(cover))) and solve(used, n - len(seed_clique))
    coloring = {v: color[v] for v in range(1, n + 1)} if ok else None
    return ColorabilityResult(ok, coloring, nodes[0])


def plain_colorable(g: Graph, c: int, budget: int = DEFAULT_BUDGET) -> ColorabilityResult:
    """Id-order backtracking; only symmetry breaking is 'new colour = max used + 1'."""
    n = g.n
    color = [0] * (n + 1)
    nodes = [0]

    def solve(v, used):
        nodes[0] += 1
        if nodes[0] > budget:
            raise BudgetExceeded(f"plain search exceeded {budget} nodes", nodes=nodes[0])
        if v > n:
            return True
        blocked = {color[u] for u in g.neighbors(v) if u < v}
        for col in range(1, min(c, used + 1) + 1):
            if col in blocked:
                continue
            color[v] = col
            if solve(v + 1, max(used, col)):
                return True
        color[v] = 0
        return False

    if c <= 0:
        return ColorabilityResult(n == 0, {} if n == 0 else None, 0)
    ok = solve(1, 0)
    return ColorabilityResult(ok, {v: color[v] for v in range(1, n + 1)} if ok else None, nodes[0])


def is_colorable(g: Graph, c: int, budget: int = DEFAULT_BUDGET) -> bool:
    return dsatur_colorable(g, c, budget).colorable


def chromatic_number(g: Graph, budget: int = DEFAULT_BUDGET) -> int:
    if g.n == 0:
        return 0
    c = len(max_clique(g))
    while not dsatur_colorable(g, c, budget).colorable:
        c += 1
    return c
