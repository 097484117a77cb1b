import json
import math

import networkx as nx
import pytest

from conftest import to_nx
from localcolor.errors import PreconditionError
from localcolor.exact import chromatic_number, dsatur_colorable
from localcolor.graph import is_proper, k_delta
from localcolor.lowerbound import (
    _rooted_ball,
    build_chain,
    build_hard_instance,
    diameter,
    hard_edge,
    indistinguishability_report,
    isomorphic,
    valid_parameters,
)
from localcolor.reducers import reduce


def brute_valid(delta, c):
    kd = max(k for k in range(0, delta) if (k + 1) * (k + 2) <= delta)
    return c <= delta - kd - 1 or (c == delta - kd and delta == (kd + 1) * (kd + 2))


@pytest.mark.parametrize("c,ok", [(9, True), (10, True), (11, False)])
def test_valid_parameters_at_12(c, ok):
    assert k_delta(12) == 2
    assert valid_parameters(12, c)[0] is ok


def test_valid_parameters_match_definition():
    for delta in range(3, 200):
        for c in range(3, delta + 1):
            assert valid_parameters(delta, c)[0] == brute_valid(delta, c), (delta, c)


def test_invalid_inputs():
    assert not valid_parameters(2, 3)[0]
    assert not valid_parameters(10, 11)[0]
    with pytest.raises(PreconditionError):
        build_chain(12, 11, 2)
    with pytest.raises(PreconditionError):
        build_chain(12, 9, 0)


def test_first_layer_is_clique():
    ch = build_chain(12, 9, 1)
    h = to_nx(ch.graph)
    assert ch.graph.n == 10 and h.number_of_edges() == 45


@pytest.mark.parametrize("i,n", [(2, 22), (3, 34), (4, 46)])
def test_chain_sizes(i, n):
    # K_{c+1}, then each step removes one vertex and adds (Δ-c+2) + (c-1)
    ch = build_chain(12, 9, i)
    assert ch.graph.n == n == 10 + (i - 1) * (5 + 8 - 1)
    assert ch.graph.delta <= 12


@pytest.mark.parametrize("delta,c,i", [(12, 9, 5), (12, 10, 4), (20, 16, 3), (30, 25, 6)])
def test_chain_structure(delta, c, i):
    ch = build_chain(delta, c, i)
    g = ch.graph
    assert g.delta <= delta
    for j in range(2, i + 1):
        stable, clique = ch.stable(j), ch.clique(j)
        assert len(stable) == delta - c + 2
        assert not any(g.has_edge(a, b) for a in stable for b in stable if a < b)
        assert all(g.has_edge(a, s) for a in clique for s in stable)
        # the last clique keeps all c-1 vertices, earlier ones lost their lowest member
        assert len(clique) == (c - 1 if j == i else c - 2)
        assert all(g.degree(a) == delta for a in clique)
        assert all(g.degree(s) <= c - 1 + delta - c + 1 for s in stable)


def test_chi_of_g3():
    assert chromatic_number(build_chain(12, 9, 3).graph) == 10


@pytest.mark.parametrize("delta,c", [(12, 9), (12, 10), (20, 16)])
def test_chi_of_g2_and_hard_instance(delta, c):
    assert chromatic_number(build_chain(delta, c, 2).graph) == c + 1
    hard = build_hard_instance(delta, c, 4)
    res = dsatur_colorable(hard, c)
    assert res.colorable and is_proper(hard, res.coloring)
    assert max(res.coloring.values()) <= c and hard.delta <= delta


def test_hard_instance_differs_by_one_edge():
    ch = build_chain(12, 9, 4)
    hard = build_hard_instance(12, 9, 4, ch)
    diff = set(ch.graph.edges()) - set(hard.edges())
    assert diff == {hard_edge(ch)} and set(hard.edges()) <= set(ch.graph.edges())
    u, v = hard_edge(ch)
    assert {ch.layer_of[u], ch.layer_of[v]} == {2, 3}


@pytest.mark.parametrize("i", [3, 2, 5])
def test_hard_instance_needs_even_i(i):
    with pytest.raises(PreconditionError):
        build_hard_instance(12, 9, i)


@pytest.mark.parametrize("i", [2, 3])
def test_reduction_gives_previous_chain(i):
    ch = build_chain(12, 9, i)
    h, _ = reduce(ch.graph, ch.top_reducer())
    assert isomorphic(h, build_chain(12, 9, i - 1).graph)
    assert nx.is_isomorphic(to_nx(h), to_nx(build_chain(12, 9, i - 1).graph))


def test_first_chain_has_no_reducer():
    with pytest.raises(PreconditionError):
        build_chain(12, 9, 1).top_reducer()


def test_radius_zero_and_one():
    ch = build_chain(12, 9, 8)
    hard = build_hard_instance(12, 9, 8, ch)
    for r in (0, 1):
        rep = indistinguishability_report(hard, ch, r)
        assert rep["fraction"] == 1.0 and rep["unmatched"] == []


def test_large_radius_exposes_the_edge():
    ch = build_chain(12, 9, 4)
    hard = build_hard_instance(12, 9, 4, ch)
    rep = indistinguishability_report(hard, ch, 2)
    u, v = hard_edge(ch)
    assert u in rep["unmatched"] and v in rep["unmatched"]
    assert rep["matched"] < rep["vertices"]
    whole = indistinguishability_report(hard, ch, diameter(ch.graph))
    assert whole["matched"] == 0


def test_negative_radius():
    ch = build_chain(12, 9, 4)
    with pytest.raises(ValueError):
        indistinguishability_report(ch.graph, ch, -1)


@pytest.mark.parametrize("r", [1, 2, 3])
def test_interior_layers_look_alike(r):
    ch = build_chain(12, 9, 12)
    match = nx.algorithms.isomorphism.categorical_node_match("label", None)
    a, b = ch.layer(6), ch.layer(7)
    assert len(a) == len(b)
    for x, y in zip(a, b):
        assert nx.is_isomorphic(_rooted_ball(ch.graph, x, r), _rooted_ball(ch.graph, y, r),
                                node_match=match)


def test_twin_quotient_against_plain_isomorphism():
    ch = build_chain(12, 9, 6)
    g = ch.graph
    match = nx.algorithms.isomorphism.categorical_node_match("root", None)

    def plain(v):
        keep = sorted(nx.single_source_shortest_path_length(to_nx(g), v, cutoff=1))
        h = to_nx(g).subgraph(keep).copy()
        nx.set_node_attributes(h, {x: x == v for x in h}, "root")
        return h

    qmatch = nx.algorithms.isomorphism.categorical_node_match("label", None)
    verts = [ch.stable(3)[0], ch.stable(4)[0], ch.clique(3)[0], ch.clique(4)[0]]
    for x in verts:
        for y in verts:
            want = nx.is_isomorphic(plain(x), plain(y), node_match=match)
            got = nx.is_isomorphic(_rooted_ball(g, x, 1), _rooted_ball(g, y, 1), node_match=qmatch)
            assert got == want


def test_annotation_json():
    ch = build_chain(12, 9, 3)
    data = json.loads(ch.annotation())
    assert data["layers"] == 3 and len(data["layer_of"]) == ch.graph.n
    assert set(data["role_of"].values()) == {"clique", "stable"}


def test_diameter_grows_linearly():
    d4, d8 = diameter(build_chain(12, 9, 4).graph), diameter(build_chain(12, 9, 8).graph)
    assert d4 < d8 and math.isclose(d8 / d4, 2, rel_tol=0.5)
