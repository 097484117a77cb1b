import networkx as nx
import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from conftest import complete, cycle
from localcolor.estimators import (
    DenseDecomposer,
    ListColorer,
    NeighborhoodCertifier,
    Theorem1Colorer,
    check_graph,
)
from localcolor.generators import clique_union, triangle_free_with_hubs
from localcolor.graph import Graph, is_proper, save_graph


def test_check_graph_inputs():
    g = cycle(5)
    assert check_graph(g) is g
    assert check_graph(save_graph(g)) == g
    assert check_graph((5, [(1, 2), (2, 3), (3, 4), (4, 5), (5, 1)])) == g
    assert check_graph(nx.cycle_graph(range(1, 6))) == g
    with pytest.raises(TypeError):
        check_graph(3.5)


def test_networkx_relabelling():
    h = nx.Graph([("a", "b"), ("b", "c")])
    g = check_graph(h)
    assert g.n == 3 and g.m == 2


def test_params_and_clone():
    est = Theorem1Colorer(k=4, profile="desk", seed=3)
    assert est.get_params() == {"k": 4, "profile": "desk", "seed": 3, "engine": "direct"}
    twin = clone(est)
    assert twin.get_params() == est.get_params() and twin is not est
    est.set_params(k=6)
    assert est.k == 6


def test_decomposer_transform():
    g = clique_union(3, 101)
    est = DenseDecomposer()
    with pytest.raises(NotFittedError):
        est.transform(g)
    labels = est.fit_transform(g)
    assert est.n_components_ == 3 and est.report_["passed"]
    assert labels.shape == (g.n,) and set(labels.tolist()) == {1, 2, 3}
    with pytest.raises(ValueError):
        est.transform(cycle(4))


def test_list_colorer():
    g = triangle_free_with_hubs(120, 12, 5, 4, seed=2)
    labels = ListColorer(seed=1).fit_predict(g)
    assert labels.dtype == np.int64 and labels.min() >= 1
    assert is_proper(g, {v: int(c) for v, c in zip(g.vertices(), labels)})
    start = ListColorer(seed=1).fit(g, {1: 3})
    assert start.labels_[0] == 3


def test_theorem1_colorer():
    g = triangle_free_with_hubs(400, 50, 30, 10, seed=0)
    est = Theorem1Colorer(k=10, seed=0).fit(g)
    assert est.certificate_ is None and est.palette_ == 49
    assert 1 <= est.labels_.min() and est.labels_.max() <= 49
    cert = Theorem1Colorer(k=3).fit(Graph.from_edges(9, [(i, j) for i in range(1, 9)
                                                          for j in range(i + 1, 9)]))
    assert cert.certificate_ is not None and not cert.labels_.any()


def test_certifier():
    est = NeighborhoodCertifier(c=4)
    with pytest.raises(NotFittedError):
        est.predict()
    assert est.fit(complete(5)).predict() is True
    assert NeighborhoodCertifier(c=3).fit(cycle(5)).predict() is False
