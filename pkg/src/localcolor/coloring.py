"""Coloring engines for graphs with small clique number.

``sparse_color`` runs the wasteful coloring round and repairs it with the
local lemma so that every uncolored target sees enough repeated colors.
``dense_extend`` colors the dense components in five stages, each an
``extend`` call whose slack comes from the stages still to come.
``theorem1_run`` chains clique search, decomposition, sparse coloring and
both extensions.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from . import lll
from .decomposition import DenseDecomposition, build_decomposition
from .errors import (
    InsufficientAntimatching,
    LLLPhaseLimit,
    LocalColorError,
    PreconditionError,
    SlackViolation,
    StageError,
)
from .graph import (
    Graph,
    PartialColoring,
    find_clique_above,
    greedy_complement_matching,
    improper_edges,
    non_adjacent_pairs_in_neighborhood,
)
from .listcolor import extend
from .profiles import BREACH, DESK, load_profile
from .sim import NodeProgram, RoundStats, ball_vertices, run

# -- wasteful coloring -------------------------------------------------------------


class WastefulRound(NodeProgram):
    """Targets draw a uniform color, then drop it if a target neighbour drew the same."""

    name = "wasteful-round"
    randomized = True

    def init(self, ctx):
        targets = ctx.params["targets"]
        if ctx.id not in targets:
            return None
        return {"peers": tuple(u for u in ctx.neighbors if u in targets), "draw": None}

    def step(self, ctx, state, r, inbox, rng):
        if state is None:
            return None, {}, True
        if r == 0:
            draw = rng.randint(1, ctx.params["palette"])
            return {**state, "draw": draw}, {u: draw for u in state["peers"]}, False
        clash = any(msg == state["draw"] for _, msg in inbox)
        return {**state, "color": None if clash else state["draw"]}, {}, True

    def output(self, ctx, state):
        return None if state is None else state["color"]


def wasteful_round(g: Graph, targets, palette: int, seed=0, stats: Optional[RoundStats] = None):
    """One round of the wasteful procedure; both ends of a monochromatic edge end uncolored."""
    if palette < 1:
        raise ValueError("palette must be >= 1")
    params = {"targets": frozenset(targets), "palette": palette}
    outputs, st = run(g, WastefulRound(), 1, seed=seed, params=params)
    if stats is not None:
        stats.absorb(st)
    return PartialColoring({v: c for v, c in outputs.items() if c is not None}, palette)


def retained_colors(target_nbrs: dict, draws: dict) -> dict:
    """Colors kept after the wasteful round given every target's draw."""
    return {v: c for v, c in draws.items()
            if all(draws[u] != c for u in target_nbrs[v])}


def repeated_colors(g: Graph, v: int, coloring) -> int:
    """Number of colors that appear on at least two neighbours of ``v``."""
    colors = coloring.colors if isinstance(coloring, PartialColoring) else coloring
    counts = Counter(colors[u] for u in g.neighbors(v) if colors.get(u) is not None)
    return sum(1 for k in counts.values() if k >= 2)


# -- sparse coloring with local-lemma repair -----------------------------------------


@dataclass
class SparseResult:
    coloring: PartialColoring
    palette: int
    phases: int
    stats: RoundStats
    host_rounds: int
    events: int
    breaches: list = field(default_factory=list)


def _bad_event(v, target_nbrs, v_nbrs, scope, bound):
    def predicate(values):
        draws = dict(zip(scope, values))
        mine = draws.get(v)
        if mine is not None and all(draws[u] != mine for u in target_nbrs[v]):
            return False
        counts = Counter()
        for u in v_nbrs:
            c = draws[u]
            if all(draws[w] != c for w in target_nbrs[u]):
                counts[c] += 1
        repeated = sum(1 for k in counts.values() if k >= 2)
        return repeated <= bound
    return predicate


def sparse_color(g: Graph, targets, ell, repeat_fraction=DESK.repeat_fraction, seed=0,
                 palette: Optional[int] = None, strict: bool = True, host: bool = True,
                 max_phases: int = 10_000, delta: Optional[int] = None) -> SparseResult:
    """Partial coloring with ⌊Δ/2⌋ colors; every uncolored target keeps > β·ℓ repeated colors.

    Targets must have at least ℓΔ non-adjacent pairs in their neighbourhood.
    With ``strict=False`` targets short of that still draw colors but carry no
    bad event, and each is listed as a breach.  The local-lemma criterion is
    not checked (the constants needed for it are far beyond desk scale);
    this override is recorded in ``breaches``.  ``delta`` defaults to the
    maximum degree of ``g``; pass the host graph's when ``g`` is a subgraph.
    """
    ell = Fraction(ell)
    beta = Fraction(repeat_fraction)
    delta = g.delta if delta is None else delta
    palette = palette if palette is not None else delta // 2
    targets = sorted(set(targets))
    breaches = []
    rich = []
    for v in targets:
        if non_adjacent_pairs_in_neighborhood(g, v) >= ell * delta:
            rich.append(v)
        elif strict:
            raise PreconditionError(f"target {v} has fewer than ℓΔ={ell * delta} non-adjacent pairs")
        else:
            breaches.append(f"{BREACH}: target {v} has fewer than ℓΔ non-adjacent pairs")
    stats = RoundStats()
    if not targets:
        stats.add_phase("wasteful-round", 0)
        return SparseResult(PartialColoring({}, palette), palette, 0, stats, 0, 0, breaches)
    if palette < 1:
        raise PreconditionError("palette ⌊Δ/2⌋ is empty")
    tset = set(targets)
    index = {v: i for i, v in enumerate(targets)}
    target_nbrs = {v: tuple(u for u in g.neighbors(v) if u in tset) for v in targets}
    variables = [lll.Variable("uniform-color", {"palette": palette}) for _ in targets]
    events = []
    bound = beta * ell
    for v in rich:
        ball = sorted(u for u in ball_vertices(g, v, 2) if u in tset)
        scope = tuple(index[u] for u in ball)
        events.append(lll.Event(scope, _bad_event(v, target_nbrs, target_nbrs[v], ball, bound),
                                anchor=(v, 2)))
    inst = lll.LLLInstance(variables, events)
    breaches.append(f"{BREACH}: local-lemma criterion not checked (explicit override)")
    try:
        res = lll.solve(inst, seed=("sparse", seed), max_phases=max_phases, host=host)
    except LLLPhaseLimit as exc:
        draws = {v: exc.assignment[index[v]] for v in targets}
        exc.coloring = PartialColoring(retained_colors(target_nbrs, draws), palette)
        exc.vertices = tuple(rich[i] for i in exc.violated)
        raise
    draws = {v: res.assignment[index[v]] for v in targets}
    coloring = PartialColoring(retained_colors(target_nbrs, draws), palette)
    stats.add_phase("wasteful-round", 1)
    stats.add_phase("lll-repair", res.host_rounds or 0)
    return SparseResult(coloring, palette, res.phases, stats, res.host_rounds or 0,
                        len(events), breaches)


# -- dense components ----------------------------------------------------------------


def matching_size(k: int) -> int:
    """Number of complement pairs taken per component: the least integer >= k/4."""
    return -(-k // 4)


@dataclass
class DenseExtensionPlan:
    component: tuple
    pairs: tuple
    U: frozenset
    Z: frozenset
    W0: frozenset
    Wplus: frozenset
    Wminus: frozenset
    dominators: int
    breaches: list = field(default_factory=list)

    def parts(self) -> dict:
        ends = frozenset(x for p in self.pairs for x in p)
        return {"M": ends, "Z": self.Z, "W0": self.W0, "W+": self.Wplus, "W-": self.Wminus}


def plan_dense_extension(g: Graph, component, k: int, component_id=None,
                         strict: bool = False) -> DenseExtensionPlan:
    """Split a dense component into matched pairs M, Z, W0, W+ and W-.

    M is the first ⌈k/4⌉ pairs of the greedy complement matching.  A vertex
    of U dominates a pair when it is adjacent to both ends; Z is the first
    ⌈|U|/5⌉ vertices by id dominating at least |M|/6 pairs.  W0 holds the
    rest of U with degree <= Δ - k, W+ those left with >= |Z|/4 neighbours in
    Z, and W- the remainder.  Failed size bounds are breaches (errors when
    ``strict``).
    """
    comp = tuple(sorted(component))
    delta = g.delta
    need = matching_size(k)
    full = greedy_complement_matching(g, comp)
    if len(full) < need:
        raise InsufficientAntimatching(component_id, len(full), need)
    pairs = full.pairs[:need]
    ends = {x for p in pairs for x in p}
    U = [v for v in comp if v not in ends]
    sets = g.neighbor_sets()
    breaches = []

    def breach(msg):
        if strict:
            raise PreconditionError(msg)
        breaches.append(f"{BREACH}: component {component_id}: {msg}")

    if not (delta - k <= len(U) and 4 * len(U) <= 4 * delta - k):
        breach(f"|U|={len(U)} outside [Δ-k, Δ-k/4]")
    qualifying = []
    for u in U:
        dom = sum(1 for a, b in pairs if a in sets[u] and b in sets[u])
        if 6 * dom >= len(pairs):
            qualifying.append(u)
    z_size = -(-len(U) // 5)
    if len(qualifying) < z_size:
        breach(f"only {len(qualifying)} dominators, fewer than |U|/5")
    Z = frozenset(qualifying[:z_size])
    rest = [u for u in U if u not in Z]
    W0 = frozenset(u for u in rest if g.degree(u) <= delta - k)
    Wplus = frozenset(u for u in rest if u not in W0 and 4 * len(sets[u] & Z) >= len(Z))
    Wminus = frozenset(u for u in rest if u not in W0 and u not in Wplus)
    if len(Wminus) > 6 * k:
        breach(f"|W-|={len(Wminus)} > 6k")
    return DenseExtensionPlan(comp, tuple(pairs), frozenset(U), Z, W0, Wplus, Wminus,
                              len(qualifying), breaches)


def identify_pairs(g: Graph, pairs):
    """Quotient graph merging each pair into one vertex.

    Returns ``(h, to_h, merged)``: ``to_h`` maps every vertex of ``g`` to its
    vertex in ``h``; ``merged`` lists the ``h`` vertices that stand for pairs.
    """
    rep = {}
    for a, b in pairs:
        rep[b] = a
    keep = [v for v in g.vertices() if v not in rep]
    index = {v: i + 1 for i, v in enumerate(keep)}
    to_h = {v: index[rep.get(v, v)] for v in g.vertices()}
    adj = [set() for _ in range(len(keep) + 1)]
    for u, v in g.edges():
        a, b = to_h[u], to_h[v]
        if a != b:
            adj[a].add(b)
            adj[b].add(a)
    h = Graph(len(keep), [()] + [tuple(sorted(s)) for s in adj[1:]], _trusted=True)
    merged = sorted(index[a] for a, _ in pairs)
    return h, to_h, merged


STAGES = ("M", "W-", "W+", "Z", "W0")


@dataclass
class StageReport:
    stage: str
    vertices: int
    min_slack: Optional[int]
    rounds: int


def _extend_components(g: Graph, plans, coloring: PartialColoring, c: int, seed,
                       stats: RoundStats, required_slack: int = 1, max_rounds: int = 2_000,
                       label: str = "dense"):
    """Five-stage extension over ``plans``; all components are handled together per stage.

    Order M, W-, W+, Z, W0 is forced: each stage's slack argument counts
    neighbours in the later stages as still uncolored.
    """
    reports = []
    out = coloring.copy(c)
    # stage 1: color the identified pairs in the quotient graph
    pairs = [p for plan in plans for p in plan.pairs]
    h, to_h, merged = identify_pairs(g, pairs)
    colored_h = PartialColoring({to_h[v]: col for v, col in out.colors.items()}, c)
    try:
        ext, st, res = extend(h, colored_h, c, required_slack, seed=(label, seed, "M"),
                              vertices=merged, max_rounds=max_rounds, stage="M",
                              phase=f"{label}-M")
    except SlackViolation as exc:
        raise StageError(f"{label} stage M (identified pairs)", exc) from exc
    stats.absorb(st)
    reports.append(StageReport("M", len(merged), res.min_slack(), st.rounds))
    for a, b in pairs:
        out.colors[a] = out.colors[b] = ext.colors[to_h[a]]
    # stages 2-5 in the original graph; Z goes before W0 so the slack holds
    for name in STAGES[1:]:
        vertices = sorted(v for plan in plans for v in plan.parts()[name])
        try:
            out, st, res = extend(g, out, c, required_slack, seed=(label, seed, name),
                                  vertices=vertices, max_rounds=max_rounds, stage=name,
                                  phase=f"{label}-{name}")
        except SlackViolation as exc:
            raise StageError(f"{label} stage {name}", exc) from exc
        stats.absorb(st)
        reports.append(StageReport(name, len(vertices), res.min_slack(), st.rounds))
    return out, reports


@dataclass
class DenseResult:
    coloring: PartialColoring
    plans: list
    stages: list
    stats: RoundStats
    breaches: list = field(default_factory=list)


def dense_extend(g: Graph, dec: DenseDecomposition, s_coloring: PartialColoring, c: int, k: int,
                 seed=0, strict: bool = False, required_slack: int = 1,
                 max_rounds: int = 2_000, components=None) -> DenseResult:
    """Extend a proper c-coloring of S to every dense component.

    ``components`` restricts the work to the given component indices (the
    others must then already be colored or be handled by the caller).
    """
    breaches = []

    def breach(msg):
        if strict:
            raise PreconditionError(msg)
        breaches.append(f"{BREACH}: {msg}")

    bad = improper_edges(g, s_coloring)
    if bad:
        raise PreconditionError(f"input coloring is improper on edge {bad[0]}")
    missing = [v for v in dec.sparse if v not in s_coloring]
    if missing:
        raise PreconditionError(f"S vertex {min(missing)} is not colored")
    delta = g.delta
    if 48 * c < 48 * delta - k:
        breach(f"c={c} < Δ - k/48")
    if delta < 30 * k:
        breach(f"Δ={delta} < 30·k")
    idx = range(len(dec.components)) if components is None else components
    plans = []
    for i in idx:
        plan = plan_dense_extension(g, dec.components[i], k, component_id=i, strict=strict)
        breaches += plan.breaches
        plans.append(plan)
    stats = RoundStats()
    if not plans:
        return DenseResult(s_coloring.copy(c), [], [], stats, breaches)
    out, stages = _extend_components(g, plans, s_coloring, c, seed, stats, required_slack,
                                     max_rounds)
    return DenseResult(out, plans, stages, stats, breaches)


# -- the full pipeline ---------------------------------------------------------------


@dataclass
class Theorem1Result:
    kind: str  # "certificate" or "coloring"
    palette: int
    coloring: Optional[PartialColoring] = None
    certificate: Optional[tuple] = None
    decomposition: Optional[DenseDecomposition] = None
    stats: RoundStats = field(default_factory=RoundStats)
    breaches: list = field(default_factory=list)
    report: dict = field(default_factory=dict)


def _sub(g: Graph, vertices):
    keep = sorted(vertices)
    return g.induced(keep), keep


def theorem1_run(g: Graph, k: int, profile="desk", seed=0, clique_budget: int = 10**7,
                 engine: str = "direct") -> Theorem1Result:
    """Clique certificate of size > Δ - k, or a proper coloring with Δ - ⌊εk⌋ colors.

    Steps: clique search; decomposition with d = density·k; sparse coloring
    of the high-degree part T of S; extension to S with the repeated-color slack;
    extension to the dense components.  Errors are wrapped in
    ``StageError`` naming the step.
    """
    prof = load_profile(profile)
    if k < 1:
        raise ValueError("k must be >= 1")
    delta = g.delta
    c = prof.palette(delta, k)
    result = Theorem1Result("coloring", c, breaches=list(prof.breaches(delta, k)))
    strict = prof.name == "paper"
    stats = result.stats
    if strict and result.breaches:
        # the paper profile is the strict mode: its hypotheses are checked, not logged
        raise StageError("hypotheses", PreconditionError("; ".join(result.breaches)))

    def step(name, fn):
        try:
            return fn()
        except (LocalColorError, AssertionError) as exc:
            if isinstance(exc, StageError):
                raise StageError(f"{name} / {exc.step}", exc.cause) from exc
            raise StageError(name, exc) from exc

    # (a) clique certificate
    found = step("clique search", lambda: find_clique_above(g, delta - k, clique_budget)
                 if delta - k >= 1 else None)
    stats.add_phase("clique-search", 1 if g.n else 0)
    if found is not None:
        v, clique = found
        result.kind = "certificate"
        result.certificate = (v, tuple(sorted(clique)))
        return result
    if c < delta // 2:
        raise StageError("palette", PreconditionError(f"palette {c} below ⌊Δ/2⌋"))

    # (b) decomposition
    d = prof.d(k)
    dec = step("decomposition",
               lambda: build_decomposition(g, d, strict=strict, engine=engine, stats=stats))
    result.decomposition = dec
    result.breaches += [b for b in dec.breaches if b not in result.breaches]

    # (c) T: vertices of S with high degree inside S
    S = dec.sparse
    gs, back = _sub(g, S)
    threshold = prof.sparse_threshold(delta, k)
    T = [i for i in gs.vertices() if gs.degree(i) >= threshold]

    # (d) sparse coloring of S, computed on G[S]: every vertex with >= ℓΔ
    # non-adjacent pairs draws a color, which covers T when the constants allow
    ell = prof.ell(k)
    drawers = [i for i in gs.vertices()
               if non_adjacent_pairs_in_neighborhood(gs, i) >= ell * delta]
    poor = [back[i - 1] for i in T if non_adjacent_pairs_in_neighborhood(gs, i) < ell * delta]
    if poor and strict:
        raise StageError("sparse coloring", PreconditionError(
            f"{len(poor)} vertices of T have fewer than ℓΔ non-adjacent pairs in S"))
    if poor:
        result.breaches.append(f"{BREACH}: {len(poor)} vertices of T have fewer than ℓΔ "
                               "non-adjacent pairs in S")
    try:
        sp = sparse_color(gs, drawers, ell, prof.repeat_fraction, seed=("t1", seed),
                          palette=delta // 2, strict=True, max_phases=prof.lll_phases,
                          delta=delta)
    except LLLPhaseLimit as exc:
        if strict:
            raise StageError("sparse coloring", exc) from exc
        # keep the last assignment; the slack check in (e) decides whether it suffices
        sp = SparseResult(exc.coloring, delta // 2, exc.phases, RoundStats(), 0,
                          len(drawers), [f"{BREACH}: local-lemma repair stopped after "
                                         f"{exc.phases} phases with {len(exc.violated)} "
                                         "events violated"])
    except LocalColorError as exc:
        raise StageError("sparse coloring", exc) from exc
    stats.absorb(sp.stats, prefix="sparse-")
    result.breaches += sp.breaches
    partial = PartialColoring({back[i - 1]: col for i, col in sp.coloring.colors.items()}, c)
    bound = prof.repeat_fraction * ell
    uncolored_t = [i for i in T if i not in sp.coloring]
    short = [back[i - 1] for i in uncolored_t if repeated_colors(gs, i, sp.coloring) <= bound]
    if short:
        # only targets without a bad event (too few non-adjacent pairs) can land here
        result.breaches.append(f"{BREACH}: {len(short)} uncolored targets with <= β·ℓ repeated colors")

    # (e) extend to the rest of S
    slack = prof.required_slack(k)
    rest = sorted(v for v in S if v not in partial)
    s_col, st, res = step("extend to S", lambda: extend(
        g, partial, c, slack, seed=("t1-S", seed), vertices=rest,
        max_rounds=prof.max_rounds, stage="S", phase="extend-S"))
    stats.absorb(st)

    # (f) dense components
    dense = step("dense extension", lambda: dense_extend(
        g, dec, s_col, c, k, seed=("t1-X", seed), strict=strict, required_slack=slack,
        max_rounds=prof.max_rounds))
    stats.absorb(dense.stats)
    result.breaches += dense.breaches
    result.coloring = dense.coloring
    result.report = {
        "T": len(T),
        "drawers": len(drawers),
        "sparse_events": sp.events,
        "lll_phases": sp.phases,
        "S_min_slack": res.min_slack(),
        "components": len(dec.components),
        "dense_stages": [vars(s) for s in dense.stages],
        "palette": c,
        "colors_used": dense.coloring.max_color(),
    }
    result.breaches = list(dict.fromkeys(result.breaches))
    return result
