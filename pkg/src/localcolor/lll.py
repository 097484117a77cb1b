"""Distributed Lovász Local Lemma in the variable setting.

Resampling follows the parallel Moser-Tardos scheme: sample every variable,
then repeatedly pick a maximal independent set of the violated events in the
dependency graph and resample exactly their variables.
"""

from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from .errors import LLLPhaseLimit, PreconditionError
from .graph import Graph
from .sim import RoundStats, _reseed, _stream_seed, luby_mis, seed_key

# -- samplers ------------------------------------------------------------------------


def _uniform_color(rng, palette):
    return rng.randint(1, palette)


def _fair_coin(rng):
    return rng.random() < 0.5


def _permutation(rng, size):
    items = list(range(1, size + 1))
    rng.shuffle(items)
    return tuple(items)


SAMPLERS = {
    "uniform-color": _uniform_color,
    "fair-coin": _fair_coin,
    "permutation": _permutation,
}


@dataclass(frozen=True)
class Variable:
    """A random variable.  ``sampler`` is a registry name or a callable ``rng -> value``."""

    sampler: object
    params: dict = field(default_factory=dict)

    def sample(self, rng: random.Random):
        if callable(self.sampler):
            return self.sampler(rng)
        return SAMPLERS[self.sampler](rng, **self.params)


# -- predicates ----------------------------------------------------------------------


def _clause(values, falsifying):
    # violated iff every literal is false
    return all(bool(v) == bool(f) for v, f in zip(values, falsifying))


def _equals(values, target):
    return tuple(values) == tuple(target)


PREDICATES = {"clause": _clause, "equals": _equals}


@dataclass(frozen=True)
class Event:
    """Bad event over ``scope``; ``predicate(values)`` receives the scoped values in scope order."""

    scope: tuple
    predicate: object
    params: dict = field(default_factory=dict)
    anchor: Optional[tuple] = None  # (host vertex, radius)

    def holds(self, values) -> bool:
        if callable(self.predicate):
            return bool(self.predicate(values))
        return PREDICATES[self.predicate](values, **self.params)


@dataclass
class LLLInstance:
    variables: list
    events: list

    def __post_init__(self):
        nv = len(self.variables)
        for i, e in enumerate(self.events):
            if not all(0 <= x < nv for x in e.scope):
                raise ValueError(f"event {i} scope refers to unknown variables")

    def occurrences(self) -> list:
        occ = [[] for _ in self.variables]
        for i, e in enumerate(self.events):
            for x in set(e.scope):
                occ[x].append(i)
        return occ

    def violated(self, assignment, events=None) -> list:
        idx = range(len(self.events)) if events is None else events
        out = []
        for i in idx:
            e = self.events[i]
            if e.holds(tuple(assignment[x] for x in e.scope)):
                out.append(i)
        return out

    def dependency_neighbors(self, occ=None) -> list:
        occ = occ if occ is not None else self.occurrences()
        nbrs = []
        for i, e in enumerate(self.events):
            s = set()
            for x in e.scope:
                s.update(occ[x])
            s.discard(i)
            nbrs.append(s)
        return nbrs

    # -- serialization ---------------------------------------------------------

    def to_json(self) -> str:
        vs, es = [], []
        for v in self.variables:
            if callable(v.sampler):
                raise ValueError("only registry samplers can be serialized")
            vs.append({"sampler": v.sampler, "params": v.params})
        for e in self.events:
            if callable(e.predicate):
                raise ValueError("only registry predicates can be serialized")
            item = {"scope": list(e.scope), "predicate": e.predicate,
                    "params": {k: list(p) if isinstance(p, tuple) else p for k, p in e.params.items()}}
            if e.anchor is not None:
                item["anchor"] = list(e.anchor)
            es.append(item)
        return json.dumps({"variables": vs, "events": es}, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "LLLInstance":
        data = json.loads(text)
        variables = []
        for v in data["variables"]:
            if v["sampler"] not in SAMPLERS:
                raise ValueError(f"unknown sampler {v['sampler']!r}")
            variables.append(Variable(v["sampler"], dict(v.get("params", {}))))
        events = []
        for e in data["events"]:
            if e["predicate"] not in PREDICATES:
                raise ValueError(f"unknown predicate {e['predicate']!r}")
            params = {k: tuple(p) if isinstance(p, list) else p for k, p in e.get("params", {}).items()}
            anchor = tuple(e["anchor"]) if "anchor" in e else None
            events.append(Event(tuple(e["scope"]), e["predicate"], params, anchor))
        return cls(variables, events)


def dependency_degree(inst: LLLInstance) -> int:
    """Maximum number of other events sharing at least one variable with an event."""
    return max((len(s) for s in inst.dependency_neighbors()), default=0)


# -- criterion -----------------------------------------------------------------------


@dataclass(frozen=True)
class Criterion:
    a: float
    c_exp: float
    p: Optional[float] = None
    d: Optional[int] = None


CPS = Criterion(math.e, 2)
GHK = Criterion(2**15, 8)
PRESETS = {"cps": CPS, "ghk": GHK}


@dataclass
class CriterionReport:
    holds: bool
    a: float
    c_exp: float
    p: float
    d: int
    d_raw: int
    value: float
    p_exact: bool
    samples: int = 0


def exact_event_probability(inst: LLLInstance, event: Event) -> Optional[Fraction]:
    """Closed form for registry events over registry samplers, else None."""
    vs = [inst.variables[x] for x in event.scope]
    if len(set(event.scope)) != len(event.scope):
        return None
    if event.predicate == "clause" and all(v.sampler == "fair-coin" for v in vs):
        return Fraction(1, 2 ** len(vs))
    if event.predicate == "equals":
        p = Fraction(1)
        for v, t in zip(vs, event.params["target"]):
            if v.sampler == "fair-coin":
                p *= Fraction(1, 2) if isinstance(t, bool) or t in (0, 1) else 0
            elif v.sampler == "uniform-color":
                pal = v.params["palette"]
                p *= Fraction(1, pal) if 1 <= t <= pal else 0
            else:
                return None
        return p
    return None


def estimate_max_probability(inst: LLLInstance, samples: int = 10**5, seed=0):
    """Largest event probability; exact where registered, Monte-Carlo otherwise.

    Returns ``(p, exact)``.
    """
    best = 0.0
    exact = True
    pending = []
    for e in inst.events:
        q = exact_event_probability(inst, e)
        if q is None:
            pending.append(e)
        else:
            best = max(best, float(q))
    if pending:
        exact = False
        rng = random.Random(f"mc/{seed}")
        for e in pending:
            hits = 0
            for _ in range(samples):
                vals = tuple(inst.variables[x].sample(rng) for x in e.scope)
                hits += e.holds(vals)
            best = max(best, hits / samples)
    return best, exact


def check_criterion(
    inst: LLLInstance,
    crit=CPS,
    p: Optional[float] = None,
    samples: int = 10**5,
    sampling: bool = True,
    seed=0,
) -> CriterionReport:
    """Evaluate ``a * p * d**c_exp < 1`` with d floored at 2."""
    if isinstance(crit, str):
        crit = PRESETS[crit]
    d_raw = crit.d if crit.d is not None else dependency_degree(inst)
    d = max(d_raw, 2)
    used_samples = 0
    p = p if p is not None else crit.p
    if p is not None:
        exact = True
    elif not inst.events:
        p, exact = 0.0, True
    else:
        exact_only = [exact_event_probability(inst, e) for e in inst.events]
        if all(q is not None for q in exact_only):
            p, exact = float(max(exact_only)), True
        elif not sampling:
            raise PreconditionError("event probability unavailable and sampling disabled")
        else:
            p, exact = estimate_max_probability(inst, samples, seed)
            used_samples = samples
    value = crit.a * p * d**crit.c_exp
    return CriterionReport(value < 1, crit.a, crit.c_exp, p, d, d_raw, value, exact, used_samples)


# -- solver ---------------------------------------------------------------------------


@dataclass
class LLLResult:
    assignment: list
    phases: int
    stats: RoundStats
    resampled: int = 0
    mis_rounds: int = 0
    host_rounds: Optional[int] = None


def _variable_rng(seed, var: int, draw: int) -> random.Random:
    """Stream for the ``draw``-th sample of variable ``var``."""
    return random.Random(_stream_seed(seed_key(("lll", seed)), var, draw))


def _greedy_mis(violated: Sequence[int], nbrs) -> list:
    chosen = []
    blocked = set()
    for i in sorted(violated):
        if i in blocked:
            continue
        chosen.append(i)
        blocked.update(nbrs(i))
    return chosen


def solve(
    inst: LLLInstance,
    seed=0,
    max_phases: int = 10_000,
    host: bool = False,
    criterion=None,
    initial=None,
) -> LLLResult:
    """Find an assignment violating no event.

    ``host=True`` selects violated events with Luby's MIS (run through the
    simulator on the dependency graph of the violated events) and converts
    phases into host-graph rounds using the events' anchor radius: each
    dependency-graph round costs ``2 * radius`` host rounds, plus ``2 *
    radius`` per phase for evaluating events.  Otherwise greedy-by-id MIS.

    ``criterion`` (a :class:`Criterion` or preset name) is checked first when
    given; passing None skips the check, which is the explicit override.
    """
    if criterion is not None:
        report = check_criterion(inst, criterion)
        if not report.holds:
            raise PreconditionError(
                f"criterion fails: {report.a:.4g}*{report.p:.4g}*{report.d}^{report.c_exp} "
                f"= {report.value:.4g} >= 1"
            )
    occ = inst.occurrences()
    draws = [0] * len(inst.variables)
    key = seed_key(("lll", seed))
    rng = random.Random(0)

    def draw(x):
        # same stream as _variable_rng(seed, x, draws[x]), without the allocation
        _reseed(rng, _stream_seed(key, x, draws[x]))
        return inst.variables[x].sample(rng)

    if initial is None:
        assignment = [draw(i) for i in range(len(inst.variables))]
    else:
        assignment = list(initial)
    violated = set(inst.violated(assignment))
    nbr_cache: dict = {}

    def nbrs(i):
        s = nbr_cache.get(i)
        if s is None:
            s = set()
            for x in inst.events[i].scope:
                s.update(occ[x])
            s.discard(i)
            nbr_cache[i] = s
        return s

    stats = RoundStats()
    phases = 0
    resampled = 0
    mis_rounds = 0
    radius = max((e.anchor[1] for e in inst.events if e.anchor), default=0)
    while violated:
        if phases >= max_phases:
            raise LLLPhaseLimit(assignment, sorted(violated), phases)
        if host:
            order = sorted(violated)
            index = {e: j + 1 for j, e in enumerate(order)}
            edges = [(index[i], index[j]) for i in order for j in nbrs(i) if j in index and j > i]
            dep = Graph.from_edges(len(order), edges)
            local = RoundStats()
            mis_idx = luby_mis(dep, seed=f"{seed}/phase{phases}", stats=local)
            mis_rounds += local.rounds
            chosen = [order[j - 1] for j in sorted(mis_idx)]
        else:
            chosen = _greedy_mis(violated, nbrs)
        touched = set()
        for i in chosen:
            for x in inst.events[i].scope:
                if x in touched:
                    continue
                touched.add(x)
                draws[x] += 1
                assignment[x] = draw(x)
        resampled += len(touched)
        recheck = set()
        for x in touched:
            recheck.update(occ[x])
        violated -= recheck
        violated.update(inst.violated(assignment, sorted(recheck)))
        phases += 1
    stats.add_phase("lll-phases", phases)
    host_rounds = None
    if host:
        host_rounds = 2 * radius * (phases + mis_rounds) if phases else 0
        stats.add_phase("lll-mis-rounds", mis_rounds)
    return LLLResult(assignment, phases, stats, resampled, mis_rounds, host_rounds)


# -- instance families -----------------------------------------------------------------


def chain_cnf(n_events: int, width: int = 4, shift: int = 2, seed=0) -> LLLInstance:
    """Clauses on a sliding window of fair coins with random signs.

    Clause ``j`` reads variables ``shift*j .. shift*j + width - 1``.  With the
    defaults each clause overlaps its two neighbours, so d = 2 and p = 1/16.
    """
    if width <= 0 or shift <= 0:
        raise ValueError("width and shift must be positive")
    rng = random.Random(f"cnf/{seed}")
    n_vars = shift * (n_events - 1) + width if n_events else 0
    variables = [Variable("fair-coin") for _ in range(n_vars)]
    events = []
    for j in range(n_events):
        scope = tuple(range(shift * j, shift * j + width))
        falsifying = tuple(rng.random() < 0.5 for _ in scope)
        events.append(Event(scope, "clause", {"falsifying": falsifying}))
    return LLLInstance(variables, events)
