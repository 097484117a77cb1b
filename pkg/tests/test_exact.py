import itertools

import networkx as nx
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import complete, cycle, from_nx, small_graphs
from localcolor.errors import BudgetExceeded
from localcolor.exact import chromatic_number, dsatur_colorable, plain_colorable
from localcolor.graph import is_proper


def brute_colorable(g, c):
    edges = list(g.edges())
    for colors in itertools.product(range(c), repeat=g.n):
        if all(colors[u - 1] != colors[v - 1] for u, v in edges):
            return True
    return g.n == 0


@given(small_graphs(max_n=7), st.integers(1, 4))
def test_solvers_agree_with_enumeration(g, c):
    want = brute_colorable(g, c)
    for solver in (dsatur_colorable, plain_colorable):
        res = solver(g, c)
        assert res.colorable == want
        if want:
            assert is_proper(g, res.coloring)
            assert set(res.coloring.values()) <= set(range(1, c + 1))


@pytest.mark.parametrize("g,chi", [
    (complete(5), 5), (cycle(5), 3), (cycle(6), 2),
    (from_nx(nx.petersen_graph()), 3),
    (from_nx(nx.mycielski_graph(4)), 4),
])
def test_chromatic_numbers(g, chi):
    assert chromatic_number(g) == chi


def test_budget_is_explicit():
    g = from_nx(nx.mycielski_graph(5))
    with pytest.raises(BudgetExceeded):
        plain_colorable(g, 4, budget=10)
    with pytest.raises(BudgetExceeded):
        dsatur_colorable(g, 4, budget=3)


def test_zero_colors():
    assert not dsatur_colorable(complete(1), 0).colorable
    assert plain_colorable(from_nx(nx.empty_graph(0)), 0).colorable
