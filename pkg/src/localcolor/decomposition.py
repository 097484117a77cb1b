"""Dense decomposition: a sparse set S and dense components X_1..X_t.

A vertex is d-dense when its neighbourhood spans more than C(Δ,2) - dΔ
edges.  Each dense vertex grows a cluster from its closed neighbourhood
(remove weak members, then absorb strong outsiders) and every vertex then
joins the cluster of the smallest-id dense vertex that contains it.

All thresholds are integers or Fractions; 3Δ/4 is tested as 4·count >= 3Δ.
"""

from __future__ import annotations

import heapq
import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Optional

from .errors import PreconditionError
from .graph import Graph
from .sim import NodeProgram, RoundStats, broadcast, run

DECOMPOSITION_ROUNDS = 6


def as_fraction(d) -> Fraction:
    # a float keeps its exact binary value; strings like "5/8" are parsed exactly
    return Fraction(d)


def _dense_from_rows(rows: Mapping, v: int, delta: int, d: Fraction) -> bool:
    nv = rows[v]
    if not nv:
        return False
    # dense iff sum_{u in N(v)} |N(u) ∩ N(v)| = 2 e(N(v)) > Δ(Δ-1) - 2dΔ
    need = delta * (delta - 1) - 2 * d * delta
    members = set(nv)
    total = 0
    left = len(nv)
    per = len(nv) - 1
    for u in nv:
        total += len(members.intersection(rows[u]))
        left -= 1
        if total + left * per <= need:
            return False
    return total > need


def is_dense_vertex(g: Graph, v: int, d) -> bool:
    """True iff the edges inside N(v) exceed C(Δ,2) - dΔ, with Δ the graph's maximum degree."""
    g.neighbors(v)
    return _dense_from_rows(_GraphRows(g), v, g.delta, as_fraction(d))


class _GraphRows:
    """Mapping-like view of a graph's adjacency rows."""

    __slots__ = ("g",)

    def __init__(self, g):
        self.g = g

    def __getitem__(self, v):
        return self.g.neighbors(v)


def grow_cluster(rows: Mapping, v: int, delta: int) -> frozenset:
    """Phase 1 for dense ``v``: start from N[v], strip weak members, absorb strong outsiders.

    Weak means fewer than 3Δ/4 neighbours in the cluster.  Outsiders are
    looked for within distance 2 of ``v``, which is where the procedure can
    reach; both loops run to their fixpoint in ascending id order.
    """
    cluster = {v, *rows[v]}
    inside = {u: sum(1 for w in rows[u] if w in cluster) for u in cluster}
    heap = [u for u in cluster if 4 * inside[u] < 3 * delta]
    heapq.heapify(heap)
    while heap:
        u = heapq.heappop(heap)
        if u not in cluster or 4 * inside[u] >= 3 * delta:
            continue
        cluster.discard(u)
        for w in rows[u]:
            if w in cluster:
                inside[w] -= 1
                if 4 * inside[w] < 3 * delta:
                    heapq.heappush(heap, w)

    reach = set(rows[v])
    for u in rows[v]:
        reach.update(rows[u])
    reach.add(v)
    outside = {u: sum(1 for w in rows[u] if w in cluster) for u in reach if u not in cluster}
    heap = [u for u, c in outside.items() if 4 * c >= 3 * delta]
    heapq.heapify(heap)
    while heap:
        u = heapq.heappop(heap)
        if u in cluster:
            continue
        cluster.add(u)
        for w in rows[u]:
            if w in outside and w not in cluster:
                outside[w] += 1
                if 4 * outside[w] >= 3 * delta:
                    heapq.heappush(heap, w)
    return frozenset(cluster)


def choose_anchor(x: int, clusters: Mapping) -> Optional[int]:
    """Smallest-id dense vertex whose cluster contains ``x``."""
    best = None
    for u, members in clusters.items():
        if x in members and (best is None or u < best):
            best = u
    return best


def settle(x: int, dense: bool, anchor: Optional[int], anchor_of_anchor: Optional[int]):
    """Phase 2 outcome for ``x``: the anchor id it stays with, or None for S.

    A sparse vertex keeps its anchor only if the anchor joined its own
    cluster; a dense vertex keeps it unconditionally.
    """
    if anchor is None:
        return None
    if dense or anchor_of_anchor == anchor:
        return anchor
    return None


@dataclass
class DenseDecomposition:
    sparse: frozenset
    components: tuple
    d: Fraction
    delta: int
    anchors: tuple = ()
    breaches: list = field(default_factory=list)

    def component_of(self) -> dict:
        return {v: i for i, comp in enumerate(self.components) for v in comp}

    def to_json(self) -> str:
        return json.dumps({
            "sparse": sorted(self.sparse),
            "components": [list(c) for c in self.components],
            "d": str(self.d),
            "delta": self.delta,
            "anchors": list(self.anchors),
            "breaches": list(self.breaches),
        }, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "DenseDecomposition":
        data = json.loads(text) if isinstance(text, str) else text
        return cls(
            frozenset(data["sparse"]),
            tuple(tuple(sorted(c)) for c in data["components"]),
            Fraction(data["d"]),
            int(data.get("delta", 0)),
            tuple(data.get("anchors", ())),
            list(data.get("breaches", [])),
        )


def _assemble(g: Graph, final: Mapping, d: Fraction, breaches) -> DenseDecomposition:
    groups: dict = {}
    sparse = set()
    for x in g.vertices():
        a = final[x]
        if a is None:
            sparse.add(x)
        else:
            groups.setdefault(a, []).append(x)
    anchors = tuple(sorted(groups))
    comps = tuple(tuple(sorted(groups[a])) for a in anchors)
    return DenseDecomposition(frozenset(sparse), comps, d, g.delta, anchors, list(breaches))


def _check_d(g: Graph, d: Fraction, strict: bool) -> list:
    if d < 0:
        raise ValueError("d must be non-negative")
    if 100 * d <= g.delta:
        return []
    msg = f"paper-precondition breach: d={d} exceeds Δ/100={Fraction(g.delta, 100)}"
    if strict:
        raise PreconditionError(msg)
    return [msg]


def build_decomposition(g: Graph, d, strict: bool = True, engine: str = "direct",
                        stats: Optional[RoundStats] = None) -> DenseDecomposition:
    """Compute a d-dense decomposition.

    ``engine="local"`` executes the procedure as a node program through the
    simulator (six rounds); ``"direct"`` computes the same result centrally.
    ``strict=False`` admits d > Δ/100 and records the breach instead.
    """
    d = as_fraction(d)
    breaches = _check_d(g, d, strict)
    if engine == "local":
        outputs, st = run(g, DecompositionProgram(), DECOMPOSITION_ROUNDS, params={"d": d},
                          phase="decomposition")
        if stats is not None:
            stats.absorb(st)
        return _assemble(g, outputs, d, breaches)
    if engine != "direct":
        raise ValueError(f"unknown engine {engine!r}")
    rows = _GraphRows(g)
    delta = g.delta
    dense = {v for v in g.vertices() if _dense_from_rows(rows, v, delta, d)}
    memo: dict = {}
    clusters = {}
    for v in sorted(dense):
        key = g.neighbor_sets()[v] | {v}
        if key not in memo:
            memo[key] = grow_cluster(rows, v, delta)
        clusters[v] = memo[key]
    anchor = {}
    for u in sorted(clusters):
        for x in clusters[u]:
            if x not in anchor:
                anchor[x] = u
    final = {}
    for x in g.vertices():
        a = anchor.get(x)
        final[x] = settle(x, x in dense, a, anchor.get(a) if a is not None else None)
    if stats is not None:
        stats.add_phase("decomposition", DECOMPOSITION_ROUNDS if g.n else 0)
    return _assemble(g, final, d, breaches)


class DecompositionProgram(NodeProgram):
    """Rounds 0-2 gather adjacency at distance 2, 2-4 spread clusters, 4-6 spread choices."""

    name = "decomposition"

    def init(self, ctx):
        return {"rows": {ctx.id: ctx.neighbors}}

    def step(self, ctx, state, r, inbox, rng):
        if r <= 2:
            rows = dict(state["rows"])
            for _, msg in inbox:
                rows.update(msg)
            if r < 2:
                return {"rows": rows}, broadcast(ctx, rows), False
            d = ctx.params["d"]
            dense = _dense_from_rows(rows, ctx.id, ctx.delta, d)
            mine = {ctx.id: grow_cluster(rows, ctx.id, ctx.delta)} if dense else {}
            new = {"dense": dense, "clusters": mine}
            return new, broadcast(ctx, mine), False
        if r <= 4:
            clusters = dict(state["clusters"])
            for _, msg in inbox:
                clusters.update(msg)
            if r < 4:
                return {**state, "clusters": clusters}, broadcast(ctx, clusters), False
            anchor = choose_anchor(ctx.id, clusters)
            choice = {ctx.id: anchor}
            return {"dense": state["dense"], "anchor": anchor, "choices": choice}, \
                broadcast(ctx, choice), False
        choices = dict(state["choices"])
        for _, msg in inbox:
            choices.update(msg)
        if r < 6:
            return {**state, "choices": choices}, broadcast(ctx, choices), False
        a = state["anchor"]
        return settle(ctx.id, state["dense"], a, choices.get(a)), {}, True


# -- verification ----------------------------------------------------------------------


def _dist_le_2_within(g: Graph, comp) -> Optional[tuple]:
    sets = g.neighbor_sets()
    members = frozenset(comp)
    for i, u in enumerate(comp):
        nu = sets[u] & members
        for w in comp[i + 1:]:
            if w in nu:
                continue
            if not nu & sets[w]:
                return (u, w)
    return None


def verify_decomposition(g: Graph, dec: DenseDecomposition) -> dict:
    """Check the five decomposition properties, plus diameter <= 2 when d <= Δ/8.

    Returns ``{"properties": {name: {"passed", "witness"}}, "passed": bool,
    "breaches": [...]}``.  A size failure that is only due to d < 1 is
    flagged as a paper-precondition breach and does not fail the report;
    when d > Δ/100 every failure is also listed as a breach.
    """
    d = as_fraction(dec.d)
    delta = g.delta
    props = {}

    seen: dict = {}
    witness = None
    for v in dec.sparse:
        seen[v] = seen.get(v, 0) + 1
    for comp in dec.components:
        for v in comp:
            seen[v] = seen.get(v, 0) + 1
    for v in g.vertices():
        if seen.get(v, 0) != 1:
            witness = {"vertex": v, "count": seen.get(v, 0)}
            break
    if witness is None:
        extra = sorted(set(seen) - set(g.vertices()))
        if extra:
            witness = {"vertex": extra[0], "count": seen[extra[0]]}
    props["partition"] = {"passed": witness is None, "witness": witness}

    witness = None
    flagged = False
    for i, comp in enumerate(dec.components):
        if not (delta - 8 * d <= len(comp) <= delta + 4 * d):
            witness = {"component": i, "size": len(comp)}
            # with d < 1 the bounds pinch below the granularity of a vertex count
            flagged = d < 1 and delta - 8 <= len(comp) <= delta + 4
            break
    props["size"] = {"passed": witness is None, "witness": witness, "flagged": flagged}

    sets = g.neighbor_sets()
    where = dec.component_of()
    witness = None
    for i, comp in enumerate(dec.components):
        out = sum(1 for v in comp for u in sets[v] if where.get(u) != i)
        if out > 8 * d * delta:
            witness = {"component": i, "boundary_edges": out}
            break
    props["boundary"] = {"passed": witness is None, "witness": witness}

    witness = None
    for v in g.vertices():
        counts: dict = {}
        for u in sets[v]:
            j = where.get(u)
            if j is not None:
                counts[j] = counts.get(j, 0) + 1
        own = where.get(v)
        if own is not None and 4 * counts.get(own, 0) < 3 * delta:
            witness = {"vertex": v, "component": own, "neighbors_inside": counts.get(own, 0)}
            break
        bad = [j for j, c in counts.items() if j != own and 4 * c >= 3 * delta]
        if bad:
            witness = {"vertex": v, "component": bad[0], "neighbors_inside": counts[bad[0]]}
            break
    props["membership"] = {"passed": witness is None, "witness": witness}

    witness = None
    rows = _GraphRows(g)
    for v in sorted(dec.sparse):
        if _dense_from_rows(rows, v, delta, d):
            witness = {"vertex": v}
            break
    props["sparse"] = {"passed": witness is None, "witness": witness}

    if 8 * d <= delta:
        witness = None
        for i, comp in enumerate(dec.components):
            pair = _dist_le_2_within(g, comp)
            if pair is not None:
                witness = {"component": i, "pair": list(pair)}
                break
        props["diameter"] = {"passed": witness is None, "witness": witness}

    breaches = list(dec.breaches)
    if props["size"]["flagged"]:
        breaches.append(f"paper-precondition breach: component size {props['size']['witness']} "
                        f"outside [Δ-8d, Δ+4d] with d={d} < 1 (small Δ)")
    if 100 * d > delta:
        breaches += [f"paper-precondition breach: property {name} fails with d > Δ/100"
                     for name, p in props.items() if not p["passed"]]
    passed = all(p["passed"] or p.get("flagged") for p in props.values())
    return {"properties": props, "passed": passed, "breaches": breaches}
