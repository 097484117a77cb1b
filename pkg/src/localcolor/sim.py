"""Synchronous LOCAL-model simulator.

A node program is an object with ``init``, ``step`` and ``output``.  At step
``r`` a node sees the messages its neighbours emitted at step ``r - 1``.  A
node that halts at step ``r`` has used ``r`` rounds of communication; the
messages it emits while halting are still delivered.  Every node gets a
private random stream keyed by ``(seed, id, round)``, so any single node can
be replayed without the rest of the run.
"""

from __future__ import annotations

import contextlib
import copy
import hashlib
import json
import random
import _random
from collections import defaultdict, deque
from dataclasses import dataclass, field
from typing import Any, Mapping, Optional

from .errors import ModelViolation, RoundLimitExceeded
from .graph import Graph


_MASK = (1 << 64) - 1

# stream that receives trace lines when run() is not given one explicitly
_trace_stream = None


@contextlib.contextmanager
def tracing(stream):
    """Send the trace of every ``run`` inside the block to ``stream``."""
    global _trace_stream
    previous, _trace_stream = _trace_stream, stream
    try:
        yield stream
    finally:
        _trace_stream = previous


def seed_key(seed) -> int:
    """64-bit key for any seed value (ints pass through, anything else is hashed)."""
    if isinstance(seed, int) and not isinstance(seed, bool):
        return seed & _MASK
    digest = hashlib.blake2b(repr(seed).encode(), digest_size=8).digest()
    return int.from_bytes(digest, "little")


def _mix(x: int) -> int:
    # splitmix64 finaliser
    x = (x + 0x9E3779B97F4A7C15) & _MASK
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK
    return x ^ (x >> 31)


def _stream_seed(key: int, vertex: int, round_index: int) -> int:
    return _mix(_mix(_mix(key) ^ vertex) ^ round_index)


def node_rng(seed, vertex: int, round_index: int) -> random.Random:
    return random.Random(_stream_seed(seed_key(seed), vertex, round_index))


_reseed = _random.Random.seed


@dataclass(frozen=True)
class NodeContext:
    id: int
    neighbors: tuple
    n: int
    delta: int
    params: Mapping = field(default_factory=dict)

    @property
    def degree(self) -> int:
        return len(self.neighbors)


class NodeProgram:
    """Base class.  Subclasses override the three hooks.

    ``step(ctx, state, round, inbox, rng)`` returns ``(state, outbox, halted)``
    where ``inbox`` is a tuple of ``(sender, message)`` sorted by sender and
    ``outbox`` maps neighbour ids to messages (or is a :class:`Broadcast`).
    ``rng`` is None unless the program sets ``randomized = True``; it is only
    valid for the duration of the call and must not be stored.
    """

    name = "program"
    randomized = False

    def init(self, ctx: NodeContext) -> Any:
        return None

    def step(self, ctx: NodeContext, state, round_index: int, inbox: tuple, rng):
        raise NotImplementedError

    def output(self, ctx: NodeContext, state):
        return state


class Broadcast:
    """Outbox sending one message to ``recipients`` (default: every neighbour)."""

    __slots__ = ("message", "recipients")

    def __init__(self, message, recipients=None):
        self.message = message
        self.recipients = recipients


def broadcast(ctx: NodeContext, message, recipients=None) -> Broadcast:
    return Broadcast(message, ctx.neighbors if recipients is None else recipients)


@dataclass
class RoundStats:
    """Round accounting per named phase.  Phase names are unique."""

    phases: dict = field(default_factory=dict)
    messages: int = 0
    halted_round: dict = field(default_factory=dict)

    @property
    def rounds(self) -> int:
        return sum(self.phases.values())

    def add_phase(self, name: str, rounds: int, messages: int = 0) -> None:
        if rounds < 0:
            raise ValueError("rounds must be >= 0")
        if name in self.phases:
            raise ValueError(f"duplicate phase name {name!r}")
        self.phases[name] = rounds
        self.messages += messages

    def absorb(self, other: "RoundStats", prefix: str = "") -> None:
        for name, r in other.phases.items():
            self.add_phase(prefix + name, r)
        self.messages += other.messages

    def to_dict(self) -> dict:
        return {"phases": dict(self.phases), "rounds": self.rounds, "messages": self.messages}


def run(
    g: Graph,
    program: NodeProgram,
    max_rounds: int,
    seed=0,
    params: Optional[Mapping] = None,
    phase: Optional[str] = None,
    debug: bool = False,
    trace=None,
):
    """Execute ``program`` on every vertex of ``g``.

    Returns ``(outputs, stats)``.  ``trace`` may be a writable text stream;
    one JSON line per (round, vertex) step is written to it.  With
    ``debug=True`` each round is re-evaluated in reverse vertex order on
    copied inputs and any difference raises ``ModelViolation``.
    """
    if max_rounds < 0:
        raise ValueError("max_rounds must be >= 0")
    params = dict(params or {})
    if trace is None:
        trace = _trace_stream
    label = phase or program.name
    nbr_sets = g.neighbor_sets()
    ctxs = {
        v: NodeContext(v, g.neighbors(v), g.n, g.delta, params) for v in g.vertices()
    }
    states = {v: program.init(ctxs[v]) for v in g.vertices()}
    active = list(g.vertices())
    inbox: dict = {}
    halted_round = {}
    messages = 0
    randomized = program.randomized
    key = seed_key(seed)
    step = program.step
    # one generator reseeded per step; same stream as node_rng(seed, v, r)
    rng = random.Random(0) if randomized else None
    base = _mix(key)

    for r in range(max_rounds + 1):
        if not active:
            break
        results = {}
        for v in active:
            if randomized:
                _reseed(rng, _mix(_mix(base ^ v) ^ r))
            results[v] = step(ctxs[v], states[v], r, tuple(inbox.get(v, ())), rng)
        if debug:
            _check_order_independence(program, ctxs, states, inbox, active, r, key, results)
        nxt = defaultdict(list)
        still = []
        for v in active:
            state, outbox, halted = results[v]
            states[v] = state
            sent = 0
            if outbox:
                if isinstance(outbox, Broadcast):
                    targets = outbox.recipients
                    if not nbr_sets[v].issuperset(targets):
                        bad = sorted(set(targets) - nbr_sets[v])[0]
                        raise ModelViolation(f"vertex {v} sent a message to non-neighbour {bad}")
                    item = (v, outbox.message)
                    for u in targets:
                        nxt[u].append(item)
                    sent = len(targets)
                else:
                    for u, msg in outbox.items():
                        if u not in nbr_sets[v]:
                            raise ModelViolation(f"vertex {v} sent a message to non-neighbour {u}")
                        nxt[u].append((v, msg))
                        sent += 1
                messages += sent
            if trace is not None:
                trace.write(json.dumps({
                    "phase": label, "round": r, "vertex": v, "sent": sent,
                    "received": len(inbox.get(v, ())), "halted": bool(halted),
                }) + "\n")
            if halted:
                halted_round[v] = r
            else:
                still.append(v)
        active = still
        inbox = nxt

    outputs = {v: program.output(ctxs[v], states[v]) for v in g.vertices()}
    if active:
        raise RoundLimitExceeded(active, max_rounds, outputs)
    stats = RoundStats(halted_round=halted_round)
    stats.add_phase(label, max(halted_round.values(), default=0), messages)
    return outputs, stats


def _check_order_independence(program, ctxs, states, inbox, active, r, key, results):
    for v in reversed(active):
        rng = node_rng(key, v, r) if program.randomized else None
        again = program.step(
            ctxs[v], copy.deepcopy(states[v]), r, copy.deepcopy(tuple(inbox.get(v, ()))), rng
        )
        if _normalise(again) != _normalise(results[v]):
            raise ModelViolation(f"vertex {v} step at round {r} depends on evaluation order")


def _normalise(result):
    state, outbox, halted = result
    if isinstance(outbox, Broadcast):
        outbox = {u: outbox.message for u in outbox.recipients}
    return state, outbox or {}, halted


# -- basic programs ----------------------------------------------------------------


class IdProgram(NodeProgram):
    """Outputs its own id and halts immediately."""

    name = "id"

    def step(self, ctx, state, round_index, inbox, rng):
        return ctx.id, {}, True


class BallProgram(NodeProgram):
    """Collects the adjacency lists of every vertex within ``params['radius']``."""

    name = "gather-ball"

    def init(self, ctx):
        return {ctx.id: ctx.neighbors}

    def step(self, ctx, state, round_index, inbox, rng):
        known = dict(state)
        for _, msg in inbox:
            known.update(msg)
        if round_index >= ctx.params.get("radius", 0):
            return known, {}, True
        return known, broadcast(ctx, known), False

    def output(self, ctx, state):
        return state


def ball_vertices(g: Graph, v: int, radius: int) -> set:
    g.neighbors(v)
    seen = {v}
    frontier = deque([(v, 0)])
    while frontier:
        x, d = frontier.popleft()
        if d == radius:
            continue
        for u in g.neighbors(x):
            if u not in seen:
                seen.add(u)
                frontier.append((u, d + 1))
    return seen


def gather_ball(g: Graph, v: int, radius: int) -> Graph:
    """Induced subgraph on vertices within ``radius`` of ``v``; ``labels`` keep original ids."""
    if radius < 0:
        raise ValueError("radius must be >= 0")
    return g.induced(ball_vertices(g, v, radius))


# -- Luby's maximal independent set --------------------------------------------------


class LubyMIS(NodeProgram):
    """Two steps per iteration: draw-and-send a value, then join if locally minimal.

    Vertices outside ``params['active']`` halt at step 0 with output False.
    """

    name = "luby-mis"
    randomized = True

    def init(self, ctx):
        active = ctx.params.get("active")
        return {"on": active is None or ctx.id in active, "value": None, "in": False}

    def step(self, ctx, state, round_index, inbox, rng):
        if not state["on"]:
            return state, {}, True
        if round_index % 2 == 0:
            if any(msg == "joined" for _, msg in inbox):
                return {**state, "in": False}, {}, True
            value = (rng.random(), ctx.id)
            return {**state, "value": value}, broadcast(ctx, ("value", value)), False
        mine = state["value"]
        rivals = [msg[1] for _, msg in inbox if isinstance(msg, tuple) and msg[0] == "value"]
        if all(mine < other for other in rivals):
            return {**state, "in": True}, broadcast(ctx, "joined"), True
        return state, {}, False

    def output(self, ctx, state):
        return state["in"]


def luby_mis(g: Graph, active=None, seed=0, max_rounds: int = 10_000, stats: Optional[RoundStats] = None):
    """Maximal independent set of ``g[active]`` computed through :func:`run`.

    If ``stats`` is given, the run's rounds are added to it as a phase.
    """
    params = {"active": frozenset(active) if active is not None else None}
    outputs, st = run(g, LubyMIS(), max_rounds, seed=seed, params=params)
    if stats is not None:
        name = "luby-mis"
        i = 1
        while name in stats.phases:
            i += 1
            name = f"luby-mis-{i}"
        stats.add_phase(name, st.rounds, st.messages)
    return frozenset(v for v, inside in outputs.items() if inside)
