"""scikit-learn style wrappers.

Each estimator takes a graph as ``X`` (a :class:`Graph`, a networkx graph,
edge-list text, or an ``(n, edges)`` pair), keeps its hyper-parameters in
``__init__`` and exposes results as trailing-underscore attributes after
``fit``.  Per-vertex outputs are numpy arrays indexed by ``vertex - 1``.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .coloring import theorem1_run
from .decomposition import build_decomposition, verify_decomposition
from .graph import Graph, PartialColoring, graph_from_json, load_graph
from .listcolor import extend
from .reducers import certify_non_colorable


def check_graph(X) -> Graph:
    """Coerce the accepted graph inputs to :class:`Graph`."""
    if isinstance(X, Graph):
        return X
    if isinstance(X, str):
        return load_graph(X)
    if isinstance(X, dict):
        return graph_from_json(X)
    if hasattr(X, "nodes") and hasattr(X, "edges"):
        nodes = sorted(X.nodes())
        index = {v: i + 1 for i, v in enumerate(nodes)}
        if any(u == v for u, v in X.edges()):
            raise ValueError("graph has a self-loop")
        return Graph.from_edges(len(nodes), [(index[u], index[v]) for u, v in X.edges()],
                                labels=nodes if nodes != list(range(1, len(nodes) + 1)) else None)
    if isinstance(X, tuple) and len(X) == 2:
        n, edges = X
        return Graph.from_edges(int(n), [tuple(e) for e in edges])
    raise TypeError(f"cannot interpret {type(X).__name__} as a graph")


def _labels(g: Graph, coloring: PartialColoring) -> np.ndarray:
    return np.array([coloring.colors.get(v, 0) for v in g.vertices()], dtype=np.int64)


class DenseDecomposer(TransformerMixin, BaseEstimator):
    """Dense decomposition; ``transform`` gives 0 for S and i for component X_i."""

    def __init__(self, d=None, engine="direct", strict=True):
        self.d = d
        self.engine = engine
        self.strict = strict

    def fit(self, X, y=None):
        g = check_graph(X)
        d = Fraction(g.delta, 100) if self.d is None else self.d
        self.decomposition_ = build_decomposition(g, d, strict=self.strict, engine=self.engine)
        self.report_ = verify_decomposition(g, self.decomposition_)
        self.n_components_ = len(self.decomposition_.components)
        self.graph_ = g
        return self

    def transform(self, X):
        check_is_fitted(self, "decomposition_")
        g = check_graph(X)
        if g != self.graph_:
            raise ValueError("transform expects the graph the decomposer was fitted on")
        where = self.decomposition_.component_of()
        return np.array([where.get(v, -1) + 1 for v in g.vertices()], dtype=np.int64)


class ListColorer(BaseEstimator):
    """Extend a partial coloring (``y``: vertex -> color, or None) to a full one."""

    def __init__(self, palette=None, required_slack=1, seed=0, max_rounds=2_000):
        self.palette = palette
        self.required_slack = required_slack
        self.seed = seed
        self.max_rounds = max_rounds

    def fit(self, X, y=None):
        g = check_graph(X)
        palette = self.palette if self.palette is not None else g.delta + 1
        start = PartialColoring(dict(y or {}), palette)
        self.coloring_, self.stats_, self.residual_ = extend(
            g, start, palette, self.required_slack, seed=self.seed, max_rounds=self.max_rounds)
        self.labels_ = _labels(g, self.coloring_)
        return self

    def fit_predict(self, X, y=None):
        return self.fit(X, y).labels_


class Theorem1Colorer(BaseEstimator):
    """Clique certificate or a coloring with Δ - ⌊εk⌋ colors.

    After ``fit``, ``certificate_`` is ``(vertex, clique)`` or None and
    ``labels_`` holds the colors (all zero when a certificate was found).
    """

    def __init__(self, k=10, profile="desk", seed=0, engine="direct"):
        self.k = k
        self.profile = profile
        self.seed = seed
        self.engine = engine

    def fit(self, X, y=None):
        g = check_graph(X)
        res = theorem1_run(g, self.k, self.profile, seed=self.seed, engine=self.engine)
        self.result_ = res
        self.certificate_ = res.certificate
        self.palette_ = res.palette
        self.breaches_ = list(res.breaches)
        coloring = res.coloring if res.coloring is not None else PartialColoring({})
        self.labels_ = _labels(g, coloring)
        return self

    def fit_predict(self, X, y=None):
        return self.fit(X).labels_


class NeighborhoodCertifier(BaseEstimator):
    """Search for a closed neighbourhood that is not c-colorable."""

    def __init__(self, c=3, budget=2 * 10**6):
        self.c = c
        self.budget = budget

    def fit(self, X, y=None):
        g = check_graph(X)
        self.certificate_ = certify_non_colorable(g, self.c, self.budget)
        return self

    def predict(self, X=None):
        """True when a certificate was found."""
        check_is_fitted(self, "certificate_")
        return self.certificate_ is not None
