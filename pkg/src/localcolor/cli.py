"""Command-line interface: ``localcolor {gen,decompose,color,certify,verify,bench}``.

Every command writes a JSON report (validated against ``report_schema.json``)
and exits with a stable code:

    0  success
    1  verification failed
    2  certificate emitted
    3  precondition breach
    4  budget exceeded (exact-search budget, round or phase limit, oracle size cap)
    64 usage error
    65 malformed input file

Flags shared by all commands can also be set through ``LOCALCOLOR_SEED``,
``LOCALCOLOR_PROFILE``, ``LOCALCOLOR_MAX_ROUNDS``, ``LOCALCOLOR_VERIFY``,
``LOCALCOLOR_TRACE`` and ``LOCALCOLOR_BUDGET``; an explicit flag wins.
"""

from __future__ import annotations

import argparse
import contextlib
import dataclasses
import json
import os
import statistics
import sys
import time
from fractions import Fraction
from importlib import resources
from pathlib import Path

import jsonschema
import networkx as nx

from . import __version__, lll
from .coloring import theorem1_run
from .decomposition import DenseDecomposition, build_decomposition, verify_decomposition
from .errors import (
    BudgetExceeded,
    GraphFormatError,
    LLLPhaseLimit,
    LocalColorError,
    PreconditionError,
    RoundLimitExceeded,
    StageError,
)
from .exact import DEFAULT_BUDGET, plain_colorable
from .generators import clique_union, random_regularish
from .graph import (
    Graph,
    PartialColoring,
    improper_edges,
    is_proper,
    read_graph_file,
    save_graph,
)
from .listcolor import solve_deg_plus
from .lowerbound import build_chain, build_hard_instance
from .profiles import load_profile
from .reducers import certify_non_colorable
from .sim import RoundStats, tracing

EXIT_OK = 0
EXIT_VERIFY = 1
EXIT_CERTIFICATE = 2
EXIT_PRECONDITION = 3
EXIT_BUDGET = 4
EXIT_USAGE = 64
EXIT_DATA = 65

# largest graph the oracle verification level accepts without --force
ORACLE_MAX_N = 400

ENV_PREFIX = "LOCALCOLOR_"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on bad usage, which is the certificate code here
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _env(name, default=None):
    return os.environ.get(ENV_PREFIX + name, default)


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--seed", type=int, default=None, help="u64 seed (default 0)")
    p.add_argument("--profile", default=None, help="paper, desk, a JSON file or inline JSON")
    p.add_argument("--max-rounds", type=int, default=None)
    p.add_argument("--verify", choices=("none", "fast", "oracle"), default=None)
    p.add_argument("--force", action="store_true", help="allow --verify oracle on large graphs")
    p.add_argument("--trace", default=None, help="write a JSON-lines round trace here")
    p.add_argument("--budget", type=int, default=None, help="exact-search work budget")
    p.add_argument("--report", default=None, help="write the JSON report here")
    p.add_argument("--timing", action="store_true", help="record wall time in the report")
    p.add_argument("-o", "--output", default=None, help="main artifact path")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = _Parser(prog="localcolor", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    gen = sub.add_parser("gen", help="generate a graph")
    kinds = gen.add_subparsers(dest="kind", required=True, parser_class=_Parser)
    for name in ("chain", "hard"):
        k = kinds.add_parser(name, parents=[common])
        k.add_argument("--delta", type=int, required=True)
        k.add_argument("--c", type=int, required=True)
        k.add_argument("--i", type=int, required=True)
    k = kinds.add_parser("random-regularish", aliases=["random"], parents=[common])
    k.add_argument("--n", type=int, required=True)
    k.add_argument("--delta", type=int, required=True)
    k = kinds.add_parser("clique-union", parents=[common])
    k.add_argument("--count", type=int, required=True)
    k.add_argument("--size", type=int, required=True)

    p = sub.add_parser("decompose", parents=[common], help="dense decomposition")
    p.add_argument("input")
    group = p.add_mutually_exclusive_group()
    group.add_argument("--d", default=None, help="density parameter, e.g. 1/2 (default Δ/100)")
    group.add_argument("--k", type=int, default=None, help="use d = density·k from the profile")
    p.add_argument("--engine", choices=("direct", "local"), default="direct")

    p = sub.add_parser("color", parents=[common], help="clique certificate or a coloring")
    p.add_argument("input")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--engine", choices=("direct", "local"), default="direct")
    p.add_argument("--certificate", default=None, help="write the certificate JSON here")

    p = sub.add_parser("certify", parents=[common], help="non-c-colorable closed neighbourhood")
    p.add_argument("input")
    p.add_argument("--c", type=int, required=True)

    p = sub.add_parser("verify", parents=[common], help="check an artifact against a graph")
    p.add_argument("input")
    what = p.add_mutually_exclusive_group(required=True)
    what.add_argument("--coloring")
    what.add_argument("--decomposition")
    what.add_argument("--certificate")
    p.add_argument("--palette", type=int, default=None)
    p.add_argument("--c", type=int, default=None)

    p = sub.add_parser("bench", parents=[common], help="round-count benchmarks")
    p.add_argument("target", choices=("list", "lll", "decompose", "color"))
    p.add_argument("--n", type=int, default=1000)
    p.add_argument("--delta", type=int, default=20)
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--repeats", type=int, default=10)
    return parser


@dataclasses.dataclass
class RunConfig:
    seed: int
    profile: object
    max_rounds: int | None
    verify: str
    force: bool
    trace: str | None
    budget: int


def _config(args) -> RunConfig:
    def pick(value, env, cast=str, default=None):
        if value is not None:
            return value
        raw = _env(env)
        if raw is None:
            return default
        try:
            return cast(raw)
        except ValueError:
            raise UsageError(f"bad value for {ENV_PREFIX}{env}: {raw!r}") from None

    verify = pick(args.verify, "VERIFY", default="fast")
    if verify not in ("none", "fast", "oracle"):
        raise UsageError(f"unknown verification level {verify!r}")
    seed = pick(args.seed, "SEED", int, 0)
    if not 0 <= seed < 2**64:
        raise UsageError("seed must be an unsigned 64-bit integer")
    try:
        profile = load_profile(pick(args.profile, "PROFILE", default="desk"))
    except (ValueError, TypeError) as exc:
        raise UsageError(str(exc)) from None
    max_rounds = pick(args.max_rounds, "MAX_ROUNDS", int)
    if max_rounds is not None:
        profile = dataclasses.replace(profile, max_rounds=max_rounds)
    return RunConfig(seed, profile, max_rounds, verify, args.force,
                     pick(args.trace, "TRACE"), pick(args.budget, "BUDGET", int, DEFAULT_BUDGET))


# -- file formats ---------------------------------------------------------------------


def format_coloring(coloring: PartialColoring) -> str:
    return "".join(f"{v} {c}\n" for v, c in sorted(coloring.colors.items()))


def parse_coloring(text: str) -> PartialColoring:
    colors = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2 or not all(p.lstrip("-").isdigit() for p in parts):
            raise GraphFormatError(f"expected '<id> <color>', got {line!r}", lineno)
        v, c = int(parts[0]), int(parts[1])
        if v in colors:
            raise GraphFormatError(f"vertex {v} colored twice", lineno)
        colors[v] = c
    return PartialColoring(colors)


def _write(path, text: str):
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _read_graph(path) -> Graph:
    try:
        return read_graph_file(path)
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def load_schema() -> dict:
    return json.loads(resources.files("localcolor").joinpath("report_schema.json").read_text())


# -- verification ---------------------------------------------------------------------


def _oracle_allowed(cfg: RunConfig, g: Graph):
    if cfg.verify == "oracle" and g.n > ORACLE_MAX_N and not cfg.force:
        raise BudgetExceeded(f"--verify oracle refuses n={g.n} > {ORACLE_MAX_N} without --force")


def check_coloring(g: Graph, coloring: PartialColoring, palette=None, level="fast") -> dict:
    """Verdicts for a claimed total proper coloring."""
    bad = improper_edges(g, coloring)
    missing = [v for v in g.vertices() if v not in coloring]
    extra = sorted(v for v in coloring.colors if not 1 <= v <= g.n)
    top = coloring.max_color()
    low = min(coloring.colors.values(), default=1)
    out = {
        "proper": {"passed": not bad, "witness": list(bad[0]) if bad else None},
        "total": {"passed": not missing and not extra,
                  "witness": (missing or extra or [None])[0]},
        "palette": {"passed": low >= 1 and (palette is None or top <= palette),
                    "witness": {"max_color": top, "palette": palette}},
    }
    if level == "oracle":
        h = nx.Graph()
        h.add_nodes_from(g.vertices())
        h.add_edges_from(g.edges())
        clash = next(([u, v] for u, v in h.edges()
                      if coloring.colors.get(u) is not None
                      and coloring.colors.get(u) == coloring.colors.get(v)), None)
        out["oracle_proper"] = {"passed": clash is None, "witness": clash}
    return out


def check_clique_certificate(g: Graph, cert, threshold: int, level="fast") -> dict:
    v, clique = cert
    pairs = [(a, b) for i, a in enumerate(clique) for b in clique[i + 1:]]
    missing = next(([a, b] for a, b in pairs if not g.has_edge(a, b)), None)
    out = {
        "clique": {"passed": missing is None, "witness": missing},
        "size": {"passed": len(clique) > threshold,
                 "witness": {"size": len(clique), "threshold": threshold}},
        "local": {"passed": all(u == v or g.has_edge(u, v) for u in clique), "witness": v},
    }
    return out


def check_no_large_clique(g: Graph, threshold: int) -> dict:
    h = nx.Graph()
    h.add_nodes_from(g.vertices())
    h.add_edges_from(g.edges())
    omega = max((len(c) for c in nx.find_cliques(h)), default=0)
    return {"passed": omega <= threshold, "witness": {"clique_number": omega,
                                                      "threshold": threshold}}


def check_certificate(g: Graph, data: dict, budget: int, level="fast") -> dict:
    v = int(data["vertex"])
    c = int(data["c"])
    ball = sorted({v, *g.neighbors(v)})
    out = {"neighbourhood": {"passed": sorted(data["vertices"]) == ball, "witness": v}}
    sub = g.induced(ball)
    out["non_colorable"] = {"passed": not plain_colorable(sub, c, budget).colorable,
                            "witness": {"vertex": v, "c": c}}
    return out


def _passed(verdicts: dict) -> bool:
    return all(x.get("passed") or x.get("flagged") for x in verdicts.values())


# -- commands -------------------------------------------------------------------------


def _graph_summary(g: Graph) -> dict:
    return {"n": g.n, "m": g.m, "delta": g.delta}


def cmd_gen(args, cfg: RunConfig, report: dict) -> int:
    kind = {"random": "random-regularish"}.get(args.kind, args.kind)
    sidecar = None
    if kind in ("chain", "hard"):
        if kind == "hard" and (args.i % 2 or args.i < 4):
            raise UsageError("gen hard needs an even --i >= 4")
        chain = build_chain(args.delta, args.c, args.i)
        g = chain.graph if kind == "chain" else build_hard_instance(args.delta, args.c, args.i, chain)
        sidecar = chain.annotation()
    elif kind == "random-regularish":
        g = random_regularish(args.n, args.delta, seed=cfg.seed)
    else:
        g = clique_union(args.count, args.size)
    _write(args.output, save_graph(g))
    if sidecar is not None and args.output not in (None, "-"):
        Path(args.output + ".layers.json").write_text(sidecar + "\n")
    report["result"] = {"kind": kind, "graph": _graph_summary(g),
                        "layers_file": None if sidecar is None or args.output in (None, "-")
                        else args.output + ".layers.json"}
    if cfg.verify != "none":
        cap = getattr(args, "delta", None)
        report["verification"] = {
            "max_degree": {"passed": cap is None or g.delta <= cap,
                           "witness": {"delta": g.delta, "cap": cap}},
        }
    return EXIT_OK


def cmd_decompose(args, cfg: RunConfig, report: dict) -> int:
    g = _read_graph(args.input)
    _oracle_allowed(cfg, g)
    if args.k is not None:
        d = cfg.profile.d(args.k)
    elif args.d is not None:
        try:
            d = Fraction(args.d)
        except ValueError:
            raise UsageError(f"bad --d {args.d!r}") from None
    else:
        d = Fraction(g.delta, 100)
    stats = RoundStats()
    dec = build_decomposition(g, d, strict=cfg.profile.name == "paper", engine=args.engine,
                              stats=stats)
    report["stats"] = stats.to_dict()
    report["breaches"] = list(dec.breaches)
    if args.output:
        _write(args.output, dec.to_json() + "\n")
    report["result"] = {"graph": _graph_summary(g), "d": str(d), "sparse": len(dec.sparse),
                        "components": [len(c) for c in dec.components]}
    if cfg.verify != "none":
        check = verify_decomposition(g, dec)
        verdicts = dict(check["properties"])
        report["breaches"] += [b for b in check["breaches"] if b not in report["breaches"]]
        if cfg.verify == "oracle":
            verdicts["oracle_sparse"] = _oracle_sparse(g, dec)
        report["verification"] = verdicts
        if not _passed(verdicts):
            return EXIT_VERIFY
    return EXIT_OK


def _oracle_sparse(g: Graph, dec: DenseDecomposition) -> dict:
    # e(N(v)) > C(Δ,2) - dΔ, counted by networkx on the induced neighbourhood
    h = nx.Graph()
    h.add_nodes_from(g.vertices())
    h.add_edges_from(g.edges())
    delta = g.delta
    limit = Fraction(delta * (delta - 1), 2) - dec.d * delta
    for v in sorted(dec.sparse):
        if h.subgraph(h.neighbors(v)).number_of_edges() > limit:
            return {"passed": False, "witness": {"vertex": v}}
    return {"passed": True, "witness": None}


def cmd_color(args, cfg: RunConfig, report: dict) -> int:
    g = _read_graph(args.input)
    _oracle_allowed(cfg, g)
    res = theorem1_run(g, args.k, cfg.profile, seed=cfg.seed, clique_budget=cfg.budget,
                       engine=args.engine)
    report["stats"] = res.stats.to_dict()
    report["palette"] = res.palette
    report["breaches"] = list(res.breaches)
    threshold = g.delta - args.k
    if res.kind == "certificate":
        v, clique = res.certificate
        cert = {"vertex": v, "clique": list(clique), "threshold": threshold}
        report["result"] = {"kind": "certificate", "certificate": cert}
        if args.certificate:
            _write(args.certificate, json.dumps(cert, sort_keys=True) + "\n")
        if cfg.verify != "none":
            report["verification"] = check_clique_certificate(g, res.certificate, threshold)
            if not _passed(report["verification"]):
                return EXIT_VERIFY
        return EXIT_CERTIFICATE
    if args.output:
        _write(args.output, format_coloring(res.coloring))
    report["result"] = {"kind": "coloring", "graph": _graph_summary(g),
                        "colors_used": res.coloring.max_color(), "details": res.report}
    if cfg.verify != "none":
        verdicts = check_coloring(g, res.coloring, res.palette, cfg.verify)
        if cfg.verify == "oracle":
            verdicts["no_large_clique"] = check_no_large_clique(g, threshold)
        report["verification"] = verdicts
        if not _passed(verdicts):
            return EXIT_VERIFY
    return EXIT_OK


def cmd_certify(args, cfg: RunConfig, report: dict) -> int:
    g = _read_graph(args.input)
    _oracle_allowed(cfg, g)
    cert = certify_non_colorable(g, args.c, cfg.budget)
    report["palette"] = args.c
    report["result"] = {"graph": _graph_summary(g),
                        "certificate": None if cert is None else json.loads(cert.to_json())}
    if cert is not None and args.output:
        _write(args.output, cert.to_json() + "\n")
    if cfg.verify != "none":
        if cert is not None:
            verdicts = check_certificate(g, json.loads(cert.to_json()), cfg.budget)
        else:
            verdicts = {}
        if cfg.verify == "oracle" and cert is None:
            # every closed neighbourhood is c-colorable, by the plain backtracking solver
            bad = next((v for v in g.vertices()
                        if not plain_colorable(g.induced(sorted({v, *g.neighbors(v)})), args.c,
                                               cfg.budget).colorable), None)
            verdicts["all_colorable"] = {"passed": bad is None, "witness": bad}
        report["verification"] = verdicts
        if not _passed(verdicts):
            return EXIT_VERIFY
    return EXIT_CERTIFICATE if cert is not None else EXIT_OK


def cmd_verify(args, cfg: RunConfig, report: dict) -> int:
    g = _read_graph(args.input)
    _oracle_allowed(cfg, g)
    level = "fast" if cfg.verify == "none" else cfg.verify
    if args.coloring:
        coloring = parse_coloring(Path(args.coloring).read_text())
        verdicts = check_coloring(g, coloring, args.palette, level)
        kind = "coloring"
    elif args.decomposition:
        dec = DenseDecomposition.from_json(Path(args.decomposition).read_text())
        check = verify_decomposition(g, dec)
        verdicts = dict(check["properties"])
        report["breaches"] = check["breaches"]
        if level == "oracle":
            verdicts["oracle_sparse"] = _oracle_sparse(g, dec)
        kind = "decomposition"
    else:
        data = json.loads(Path(args.certificate).read_text())
        if "clique" in data:
            verdicts = check_clique_certificate(g, (data["vertex"], tuple(data["clique"])),
                                                int(data["threshold"]))
        else:
            if args.c is not None:
                data["c"] = args.c
            verdicts = check_certificate(g, data, cfg.budget)
        kind = "certificate"
    report["result"] = {"kind": kind, "graph": _graph_summary(g)}
    report["verification"] = verdicts
    return EXIT_OK if _passed(verdicts) else EXIT_VERIFY


def _summary(values) -> dict:
    values = sorted(values)
    if not values:
        return {"median": None, "p95": None, "max": None}
    p95 = values[min(len(values) - 1, -(-95 * len(values) // 100) - 1)]
    return {"median": statistics.median(values), "p95": p95, "max": values[-1]}


def cmd_bench(args, cfg: RunConfig, report: dict) -> int:
    if args.repeats < 1:
        raise UsageError("--repeats must be >= 1")
    rounds = []
    failures = []
    for r in range(args.repeats):
        seed = (cfg.seed, r)
        if args.target == "lll":
            res = lll.solve(lll.chain_cnf(args.n, seed=seed), seed=seed)
            rounds.append(res.phases)
        elif args.target == "list":
            g = random_regularish(args.n, args.delta, seed=seed)
            lists = {v: range(1, g.degree(v) + 2) for v in g.vertices()}
            col, st = solve_deg_plus(g, lists, seed=seed,
                                     max_rounds=cfg.max_rounds or 2_000)
            if not is_proper(g, col) or len(col) != g.n:
                raise AssertionError("list coloring produced an improper or partial coloring")
            rounds.append(st.rounds)
        elif args.target == "decompose":
            g = random_regularish(args.n, args.delta, seed=seed)
            st = RoundStats()
            build_decomposition(g, Fraction(g.delta, 100), strict=False, engine="local", stats=st)
            rounds.append(st.rounds)
        else:
            g = random_regularish(args.n, args.delta, seed=seed)
            try:
                res = theorem1_run(g, args.k, cfg.profile, seed=seed, clique_budget=cfg.budget)
            except StageError as exc:
                failures.append({"repeat": r, "error": str(exc)})
                continue
            if res.coloring is not None and not is_proper(g, res.coloring):
                raise AssertionError("pipeline produced an improper coloring")
            rounds.append(res.stats.rounds)
    report["result"] = {"target": args.target, "n": args.n, "delta": args.delta,
                        "repeats": args.repeats, "rounds": rounds, "failures": failures,
                        **_summary(rounds)}
    if cfg.verify != "none":
        report["verification"] = {"completed": {"passed": not failures,
                                                "witness": len(rounds)}}
        if failures:
            return EXIT_VERIFY
    return EXIT_OK


COMMANDS = {"gen": cmd_gen, "decompose": cmd_decompose, "color": cmd_color,
            "certify": cmd_certify, "verify": cmd_verify, "bench": cmd_bench}


def _root_cause(exc):
    while isinstance(exc, StageError):
        exc = exc.cause
    return exc


def _exit_code_for(exc) -> int:
    cause = _root_cause(exc)
    if isinstance(cause, GraphFormatError):
        return EXIT_DATA
    if isinstance(cause, PreconditionError):
        return EXIT_PRECONDITION
    if isinstance(cause, (BudgetExceeded, RoundLimitExceeded, LLLPhaseLimit)):
        return EXIT_BUDGET
    return EXIT_PRECONDITION


def _echo(args) -> dict:
    skip = {"report", "trace", "timing"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        cfg = _config(args)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    report = {
        "command": _echo(args),
        "seed": cfg.seed,
        "profile": json.loads(cfg.profile.to_json()),
        "verify": cfg.verify,
        "stats": {},
        "palette": None,
        "breaches": [],
        "verification": None,
        "result": None,
        "error": None,
        "exit_code": None,
        "wall_time": None,
    }
    started = time.perf_counter()
    with contextlib.ExitStack() as stack:
        if cfg.trace:
            stack.enter_context(tracing(stack.enter_context(open(cfg.trace, "w"))))
        try:
            code = COMMANDS[args.command](args, cfg, report)
        except UsageError as exc:
            code = EXIT_USAGE
            report["error"] = {"type": "UsageError", "message": str(exc)}
            print(exc, file=sys.stderr)
        except (LocalColorError, ValueError) as exc:
            code = _exit_code_for(exc)
            cause = _root_cause(exc)
            report["error"] = {"type": type(cause).__name__, "message": str(exc)}
            print(f"localcolor: {exc}", file=sys.stderr)
    if args.timing:
        report["wall_time"] = round(time.perf_counter() - started, 6)
    if cfg.verify != "none" and report["verification"] is None:
        report["verification"] = {}
    report["exit_code"] = code
    jsonschema.validate(report, load_schema())
    text = json.dumps(report, sort_keys=True, indent=2) + "\n"
    if args.report:
        _write(args.report, text)
    elif not (args.command == "gen" and args.output in (None, "-")):
        # gen without -o already used stdout for the graph
        sys.stdout.write(text)
    return code


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
