"""Shared builders and brute-force oracles for the test suite."""

from __future__ import annotations

from itertools import combinations

import numpy as np

from flowcomplete import BipartiteGraph, ObservationMask


def random_connected_mask(rng: np.random.Generator, n_rows: int, n_cols: int,
                          extra: float = 0.3) -> ObservationMask:
    """Random pattern whose graph is connected.

    A zig-zag chain over shuffled rows and columns guarantees connectivity;
    Bernoulli extras add cycles.
    """
    rows = rng.permutation(n_rows).tolist()
    cols = rng.permutation(n_cols).tolist()
    pairs = set()
    k = min(n_rows, n_cols)
    for s in range(k):
        pairs.add((rows[s], cols[s]))
        if s + 1 < k:
            pairs.add((rows[s + 1], cols[s]))
    for r in rows[k:]:
        pairs.add((r, cols[0]))
    for c in cols[k:]:
        pairs.add((rows[0], c))
    dense = rng.random((n_rows, n_cols)) < extra
    extra_rows, extra_cols = np.nonzero(dense)
    pairs.update(zip(extra_rows.tolist(), extra_cols.tolist()))
    return ObservationMask.from_pairs(n_rows, n_cols, pairs)


def random_mask(rng: np.random.Generator, n_rows: int, n_cols: int,
                p: float) -> ObservationMask:
    """Plain Bernoulli pattern; may be empty or disconnected."""
    dense = rng.random((n_rows, n_cols)) < p
    return ObservationMask.from_dense(dense)


def random_additive(rng: np.random.Generator, n_rows: int, n_cols: int):
    """Random factors and their induced additive matrix."""
    a = rng.normal(0.0, 1.0, n_rows)
    b = rng.normal(0.0, 1.0, n_cols)
    return a, b, a[:, None] + b[None, :]


def complete_mask(n_rows: int, n_cols: int) -> ObservationMask:
    return ObservationMask.from_dense(np.ones((n_rows, n_cols)))


def brute_force_min_cut(graph: BipartiteGraph, i: int, j: int) -> int:
    """Smallest number of edges whose removal disconnects u_i from v_j.

    Exhaustive over subsets in increasing size; only for tiny graphs.
    """
    edges = list(graph.edges)
    target = graph.n_left + j

    def connected_without(removed) -> bool:
        adjacency = [[] for _ in range(graph.n_vertices)]
        for edge in edges:
            if edge in removed:
                continue
            u, v = edge[0], graph.n_left + edge[1]
            adjacency[u].append(v)
            adjacency[v].append(u)
        seen = {i}
        stack = [i]
        while stack:
            u = stack.pop()
            for v in adjacency[u]:
                if v not in seen:
                    seen.add(v)
                    stack.append(v)
        return target in seen

    if not connected_without(frozenset()):
        return 0
    for size in range(1, len(edges) + 1):
        for subset in combinations(edges, size):
            if not connected_without(frozenset(subset)):
                return size
    raise AssertionError("removing all edges must disconnect the pair")
