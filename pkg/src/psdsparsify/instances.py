"""Random test instances shared by the test suite and the demo scripts."""

from __future__ import annotations

import numpy as np

from .applications import WeightedGraph, WeightedHypergraph
from .linalg import PsdCollection


def random_psd_collection(
    n: int, m: int, seed: int = 0, max_rank: int = 4
) -> PsdCollection:
    """m random Gaussian-factor PSD matrices of dimension n, ranks 1..max_rank."""
    rng = np.random.default_rng(seed)
    mats = []
    for _ in range(m):
        k = int(rng.integers(1, max_rank + 1))
        g = rng.standard_normal((n, k))
        mats.append(g @ g.T)
    return PsdCollection.from_matrices(mats, validate=False)


def identity_decomposition(n: int) -> PsdCollection:
    """The n coordinate projectors e_i e_i^T."""
    mats = [np.diag((np.arange(n) == i).astype(float)) for i in range(n)]
    return PsdCollection.from_matrices(mats, validate=False)


def complete_graph(n: int) -> WeightedGraph:
    edges = [(u, v, 1.0) for u in range(1, n + 1) for v in range(u + 1, n + 1)]
    return WeightedGraph(n=n, edges=edges)


def cycle_graph(n: int) -> WeightedGraph:
    edges = [(u, u + 1, 1.0) for u in range(1, n)] + [(1, n, 1.0)]
    return WeightedGraph(n=n, edges=sorted(edges))


def gnp_graph(n: int, p: float, seed: int = 0) -> WeightedGraph:
    """G(n, p) with unit weights; resamples until at least one edge exists."""
    rng = np.random.default_rng(seed)
    while True:
        edges = [
            (u, v, 1.0)
            for u in range(1, n + 1)
            for v in range(u + 1, n + 1)
            if rng.random() < p
        ]
        if edges:
            return WeightedGraph(n=n, edges=edges)


def random_uniform_hypergraph(
    n: int, m: int, r: int, seed: int = 0
) -> WeightedHypergraph:
    """m distinct r-uniform hyperedges with weights in [0.5, 1.5]."""
    rng = np.random.default_rng(seed)
    seen = set()
    hyperedges = []
    guard = 0
    while len(hyperedges) < m:
        guard += 1
        if guard > 100 * m:
            raise ValueError(f"cannot place {m} distinct {r}-edges on {n} vertices")
        verts = tuple(sorted(rng.choice(n, size=r, replace=False) + 1))
        if verts in seen:
            continue
        seen.add(verts)
        hyperedges.append((verts, float(rng.uniform(0.5, 1.5))))
    return WeightedHypergraph(n=n, hyperedges=hyperedges)
