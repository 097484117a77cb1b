"""Residual lists and randomized (deg+1)-list coloring.

Extending a partial c-coloring is a list-coloring problem on the uncolored
vertices: each keeps the palette colors its colored neighbours do not use.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass

from .errors import PreconditionError, RoundLimitExceeded, SlackViolation
from .graph import Graph, PartialColoring, improper_edges
from .sim import Broadcast, NodeProgram, RoundStats, run

DEFAULT_MAX_ROUNDS = 2_000


@dataclass
class ListAssignment:
    lists: dict
    palette: int

    def __post_init__(self):
        for v, colors in self.lists.items():
            bad = [c for c in colors if not 1 <= c <= self.palette]
            if bad:
                raise ValueError(f"vertex {v} list has colors {bad} outside 1..{self.palette}")


@dataclass
class Residual:
    """Uncolored vertex set, its residual lists, and per-vertex slack."""

    vertices: tuple
    lists: ListAssignment
    d_u: dict
    slack: dict
    repeated: dict

    def min_slack(self):
        return min(self.slack.values(), default=None)


def residual_lists(g: Graph, colored: PartialColoring, palette: int, vertices=None) -> Residual:
    """Lists for the uncolored ``vertices`` (default: every uncolored vertex).

    ``d_u`` counts neighbours inside the target set only; uncolored
    neighbours outside it are ignored, as when a later stage will color them.
    """
    bad = improper_edges(g, colored)
    if bad:
        raise PreconditionError(f"input coloring is improper on edge {bad[0]}")
    colors = colored.colors
    for v, c in colors.items():
        if not 1 <= c <= palette:
            raise PreconditionError(f"vertex {v} has color {c} outside 1..{palette}")
    if vertices is None:
        targets = tuple(v for v in g.vertices() if v not in colors)
    else:
        targets = tuple(sorted(set(vertices)))
        already = [v for v in targets if v in colors]
        if already:
            raise PreconditionError(f"vertex {already[0]} is already colored")
    target_set = set(targets)
    full = frozenset(range(1, palette + 1))
    lists, d_u, slack, repeated = {}, {}, {}, {}
    for u in targets:
        nbr_colors = Counter(colors[w] for w in g.neighbors(u) if w in colors)
        lists[u] = full - nbr_colors.keys()
        d_u[u] = sum(1 for w in g.neighbors(u) if w in target_set)
        slack[u] = len(lists[u]) - d_u[u]
        repeated[u] = sum(1 for k in nbr_colors.values() if k >= 2)
        # repeated colors each free a list entry beyond the degree count
        assert slack[u] >= palette + repeated[u] - g.degree(u), u
    return Residual(targets, ListAssignment(lists, palette), d_u, slack, repeated)


class TrialColoring(NodeProgram):
    """Each round an uncolored vertex proposes a random list color with probability ``p``.

    A proposal made at step r is kept at step r + 1 iff no neighbour proposed
    the same color at step r and no neighbour committed it.  Messages are
    ``(committed, proposal)`` pairs.
    """

    name = "deg+1-list-coloring"
    randomized = True

    def init(self, ctx):
        lists = ctx.params["lists"]
        if ctx.id not in lists:
            return None
        peers = tuple(u for u in ctx.neighbors if u in lists)
        return {"list": frozenset(lists[ctx.id]), "proposal": None, "color": None, "peers": peers}

    def step(self, ctx, state, round_index, inbox, rng):
        if state is None:
            return None, {}, True
        taken = set()
        proposed = set()
        for _, (committed, proposal) in inbox:
            if committed is not None:
                taken.add(committed)
            if proposal is not None:
                proposed.add(proposal)
        lst = state["list"] - taken
        mine = state["proposal"]
        if mine is not None and mine not in taken and mine not in proposed:
            done = {**state, "list": lst, "proposal": None, "color": mine}
            return done, Broadcast((mine, None), state["peers"]), True
        if not lst:
            raise PreconditionError(f"vertex {ctx.id} ran out of colors")
        proposal = None
        if rng.random() < ctx.params["p"]:
            proposal = rng.choice(sorted(lst))
        new = {**state, "list": lst, "proposal": proposal}
        out = Broadcast((None, proposal), state["peers"]) if proposal is not None else None
        return new, out, False

    def output(self, ctx, state):
        return None if state is None else state["color"]


def solve_deg_plus(
    g: Graph,
    lists,
    seed=0,
    max_rounds: int = DEFAULT_MAX_ROUNDS,
    p: float = 0.5,
    palette=None,
    phase: str = TrialColoring.name,
):
    """List-color ``g[domain(lists)]`` where every list exceeds the induced degree.

    Returns ``(coloring, stats)``; the coloring covers exactly the domain.
    Raises ``RoundLimitExceeded`` with the still-uncolored vertices.
    """
    if isinstance(lists, ListAssignment):
        palette = palette or lists.palette
        lists = lists.lists
    domain = set(lists)
    for v in domain:
        d = sum(1 for w in g.neighbors(v) if w in domain)
        if len(lists[v]) < d + 1:
            raise PreconditionError(
                f"vertex {v} has |L|={len(lists[v])} < induced degree {d} + 1"
            )
    if not 0 < p <= 1:
        raise ValueError("proposal probability must be in (0, 1]")
    params = {"lists": {v: tuple(sorted(lists[v])) for v in domain}, "p": p}
    try:
        outputs, stats = run(g, TrialColoring(), max_rounds, seed=seed, params=params, phase=phase)
    except RoundLimitExceeded as exc:
        stuck = {v for v in exc.unhalted if v in domain}
        raise RoundLimitExceeded(stuck, exc.rounds, exc.outputs) from None
    colors = {v: c for v, c in outputs.items() if c is not None}
    return PartialColoring(colors, palette), stats


def extend(
    g: Graph,
    colored: PartialColoring,
    palette: int,
    required_slack: int = 1,
    seed=0,
    vertices=None,
    max_rounds: int = DEFAULT_MAX_ROUNDS,
    p: float = 0.5,
    stage=None,
    phase: str = "extend",
):
    """Extend ``colored`` to ``vertices`` (default: all uncolored) with colors ``1..palette``.

    Returns ``(coloring, stats, residual)``.  Raises ``SlackViolation`` for the
    first vertex whose slack is below ``required_slack``.
    """
    if required_slack < 1:
        raise ValueError("required_slack must be >= 1")
    res = residual_lists(g, colored, palette, vertices)
    for u in res.vertices:
        if res.slack[u] < required_slack:
            raise SlackViolation(u, len(res.lists.lists[u]), res.d_u[u], g.degree(u),
                                 required_slack, stage)
    out = colored.copy(palette)
    if not res.vertices:
        stats = RoundStats()
        stats.add_phase(phase, 0)
        return out, stats, res
    sub, stats = solve_deg_plus(g, res.lists, seed=seed, max_rounds=max_rounds, p=p,
                                palette=palette, phase=phase)
    out.colors.update(sub.colors)
    return out, stats, res
