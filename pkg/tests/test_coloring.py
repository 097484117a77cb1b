from fractions import Fraction

import networkx as nx
import pytest

from conftest import complete, cycle
from localcolor.coloring import (
    STAGES,
    dense_extend,
    matching_size,
    plan_dense_extension,
    repeated_colors,
    retained_colors,
    sparse_color,
    theorem1_run,
    wasteful_round,
)
from localcolor.decomposition import DenseDecomposition, build_decomposition
from localcolor.errors import InsufficientAntimatching, PreconditionError, StageError
from localcolor.generators import complete_minus_matching, triangle_free_with_hubs
from localcolor.graph import Graph, PartialColoring, greedy_complement_matching, is_proper
from localcolor.profiles import DESK


def bipartite(m):
    return Graph.from_edges(2 * m, [(i, m + j) for i in range(1, m + 1) for j in range(1, m + 1)])


# -- wasteful round ---------------------------------------------------------------------


def test_independent_targets_all_retain():
    g = cycle(10)
    evens = [2, 4, 6, 8, 10]
    col = wasteful_round(g, evens, 1, seed=3)
    assert sorted(col.colors) == evens


def test_forced_conflict_uncolors_both():
    g = complete(2)
    for seed in range(5):
        assert wasteful_round(g, [1, 2], 1, seed=seed).colors == {}


def test_triangle_with_huge_palette():
    g = complete(3)
    full = sum(len(wasteful_round(g, [1, 2, 3], 10**6, seed=s).colors) == 3 for s in range(100))
    assert full >= 99


def test_wasteful_round_proper_and_in_palette():
    g = to_graph(nx.gnp_random_graph(40, 0.2, seed=1))
    for seed in range(10):
        col = wasteful_round(g, g.vertices(), 6, seed=seed)
        assert is_proper(g, col) and all(1 <= c <= 6 for c in col.colors.values())


def test_larger_palette_keeps_more_on_average():
    g = to_graph(nx.gnp_random_graph(40, 0.3, seed=2))
    kept = {C: sum(len(wasteful_round(g, g.vertices(), C, seed=s).colors) for s in range(40))
            for C in (3, 30)}
    assert kept[30] > kept[3]


def test_palette_must_be_positive():
    with pytest.raises(ValueError):
        wasteful_round(complete(2), [1], 0)


def test_retained_colors_symmetric():
    nbrs = {1: (2,), 2: (1, 3), 3: (2,)}
    assert retained_colors(nbrs, {1: 5, 2: 5, 3: 4}) == {3: 4}


def to_graph(h):
    nodes = sorted(h.nodes())
    index = {v: i + 1 for i, v in enumerate(nodes)}
    return Graph.from_edges(len(nodes), [(index[u], index[v]) for u, v in h.edges()])


# -- repeated colors --------------------------------------------------------------------


def test_repeated_colors_examples():
    star = Graph.from_edges(5, [(1, u) for u in range(2, 6)])
    assert repeated_colors(star, 1, {2: 1, 3: 2, 4: 3, 5: 4}) == 0
    assert repeated_colors(star, 1, {2: 1, 3: 1, 4: 2, 5: 2}) == 2
    assert repeated_colors(cycle(5), 1, {2: 3, 5: 3}) == 1
    assert repeated_colors(cycle(5), 1, PartialColoring({2: 3}, 3)) == 0


# -- sparse coloring --------------------------------------------------------------------


def test_sparse_no_targets():
    res = sparse_color(complete(5), [], 2)
    assert res.coloring.colors == {} and res.phases == 0


@pytest.mark.parametrize("seed", range(5))
def test_sparse_on_complete_bipartite(seed):
    g = bipartite(10)
    res = sparse_color(g, g.vertices(), 2, Fraction(1, 4), seed=seed)
    col = res.coloring
    assert res.palette == 5 and is_proper(g, col)
    assert all(1 <= c <= 5 for c in col.colors.values())
    for v in g.vertices():
        if v not in col:
            assert repeated_colors(g, v, col) > Fraction(1, 4) * 2


def test_sparse_rejects_poor_target():
    g = complete(6)
    with pytest.raises(PreconditionError):
        sparse_color(g, [1], 1)
    res = sparse_color(g, [1], 1, strict=False)
    assert any("fewer than" in b for b in res.breaches)


def test_sparse_records_override():
    res = sparse_color(bipartite(6), range(1, 13), 1, seed=0)
    assert any("local-lemma criterion" in b for b in res.breaches)


# -- dense plans ------------------------------------------------------------------------


def test_matching_size_rounds_up():
    assert [matching_size(k) for k in (1, 2, 4, 5, 8)] == [1, 1, 1, 2, 2]


def test_plan_rejects_clique():
    g = complete(12)
    with pytest.raises(InsufficientAntimatching):
        plan_dense_extension(g, g.vertices(), 4, component_id=0)


def test_plan_on_clique_minus_matching():
    delta = 60
    g = complete_minus_matching(delta)
    k = delta // 30
    plan = plan_dense_extension(g, g.vertices(), k)
    assert len(plan.pairs) == matching_size(k) == 1
    sets = g.neighbor_sets()
    for u in plan.U:
        assert all(a in sets[u] and b in sets[u] for a, b in plan.pairs)
    z = -(-len(plan.U) // 5)
    assert plan.Z == frozenset(sorted(plan.U)[:z])


@pytest.mark.parametrize("k", [2, 4, 8])
def test_plan_parts_partition_component(k):
    g = complete_minus_matching(40)
    plan = plan_dense_extension(g, g.vertices(), k)
    parts = plan.parts()
    assert sum(len(p) for p in parts.values()) == g.n
    assert frozenset().union(*parts.values()) == frozenset(g.vertices())
    for a, b in plan.pairs:
        assert not g.has_edge(a, b)


def test_unmatched_vertices_form_clique():
    h = nx.complement(nx.gnp_random_graph(30, 0.15, seed=4))
    g = to_graph(h)
    m = greedy_complement_matching(g, g.vertices())
    ends = {x for p in m.pairs for x in p}
    rest = [v for v in g.vertices() if v not in ends]
    assert all(g.has_edge(u, v) for i, u in enumerate(rest) for v in rest[i + 1:])


# -- dense extension --------------------------------------------------------------------


def test_dense_extend_with_everything_sparse():
    g = cycle(7)
    dec = build_decomposition(g, 0)
    start = PartialColoring({v: 1 + v % 2 for v in range(1, 7)} | {7: 3}, 3)
    res = dense_extend(g, dec, start, 3, 1)
    assert res.coloring.colors == start.colors and res.plans == []


def test_dense_extend_clique_minus_matching():
    delta, k = 60, 2
    g = complete_minus_matching(delta)
    # at d = k/16 the neighbourhoods fall short of dense, so the component is given
    dec = DenseDecomposition(frozenset(), (g.vertices(),), Fraction(k, 16), delta)
    c = delta - k // 48
    res = dense_extend(g, dec, PartialColoring({}, c), c, k, seed=1)
    col = res.coloring
    assert col.is_total(g) and is_proper(g, col) and col.max_color() <= c
    for plan in res.plans:
        for a, b in plan.pairs:
            assert col.colors[a] == col.colors[b]
    assert [s.stage for s in res.stages] == list(STAGES)


def test_dense_extend_rejects_improper_input():
    g = complete(3)
    dec = DenseDecomposition(frozenset({1, 2, 3}), (), Fraction(0), 2)
    with pytest.raises(PreconditionError):
        dense_extend(g, dec, PartialColoring({1: 1, 2: 1, 3: 2}, 3), 3, 1)
    with pytest.raises(PreconditionError):
        dense_extend(g, dec, PartialColoring({1: 1, 2: 2}, 3), 3, 1)


# -- the full pipeline ------------------------------------------------------------------


def test_theorem1_certificate():
    g = Graph.from_edges(12, [(i, j) for i in range(1, 9) for j in range(i + 1, 9)])
    res = theorem1_run(g, 3)
    assert res.kind == "certificate"
    v, clique = res.certificate
    assert len(clique) == 8 > g.delta - 3 and v in clique
    assert all(g.has_edge(a, b) for i, a in enumerate(clique) for b in clique[i + 1:])


def test_theorem1_triangle_free():
    g = triangle_free_with_hubs(400, 50, 30, 10, seed=0)
    assert g.delta == 50
    res = theorem1_run(g, 10, "desk", seed=0)
    assert res.kind == "coloring"
    col = res.coloring
    assert col.is_total(g) and is_proper(g, col)
    assert res.palette == 50 - int(DESK.epsilon * 10) == 49
    assert col.max_color() <= 49


def test_theorem1_paper_profile_is_strict():
    g = triangle_free_with_hubs(200, 30, 10, 6, seed=1)
    with pytest.raises(StageError) as err:
        theorem1_run(g, 2, "paper")
    assert err.value.step == "hypotheses"


def test_theorem1_bad_k():
    with pytest.raises(ValueError):
        theorem1_run(complete(4), 0)
