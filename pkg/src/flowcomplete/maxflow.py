"""Unit-capacity max flow, edge-disjoint paths, and minimum cuts.

Each undirected edge is replaced by two opposite unit-capacity arcs; arcs
into the source and out of the sink are dropped.  Max flow is found with
shortest-path (BFS) augmentation, neighbors scanned in ascending vertex
order, which makes the returned path set deterministic and biased toward
short paths.  After cancelling antiparallel flow the paths are read off by
walking the flow from the source, zeroing any cycles encountered.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from .graph import BipartiteGraph


@dataclass(frozen=True)
class PathSet:
    """Maximal collection of edge-disjoint source->sink paths.

    ``paths`` holds alternating index sequences (row, col, row, ...); ``k``
    equals the minimum edge cut separating the pair (Menger), and
    ``max_len`` is the largest edge count over the set (0 when empty).
    """

    paths: tuple
    k: int
    max_len: int
    source: int
    sink: int


@dataclass(frozen=True)
class CutCertificate:
    """Minimum edge cut: residual-reachable side and the crossing edges."""

    left_side: frozenset
    cut_edges: tuple


def _unit_max_flow(graph: BipartiteGraph, i: int, j: int):
    """Max flow from u_i to v_j; returns (flow dict on arcs, value)."""
    source = i
    sink = graph.n_left + j
    flow: dict = {}

    def residual(u: int, v: int) -> int:
        capacity = 0 if (v == source or u == sink) else 1
        return capacity - flow.get((u, v), 0) + flow.get((v, u), 0)

    value = 0
    while True:
        parent = {source: None}
        queue = deque([source])
        reached = False
        while queue and not reached:
            u = queue.popleft()
            for v in graph.adjacency[u]:
                if v not in parent and residual(u, v) > 0:
                    parent[v] = u
                    if v == sink:
                        reached = True
                        break
                    queue.append(v)
        if not reached:
            break
        v = sink
        while parent[v] is not None:
            u = parent[v]
            if flow.get((v, u), 0) > 0:
                flow[(v, u)] -= 1
            else:
                flow[(u, v)] = flow.get((u, v), 0) + 1
            v = u
        value += 1

    # cancel any antiparallel pair; afterwards each undirected edge carries
    # flow in at most one direction
    for row, col in graph.edges:
        u, v = row, graph.n_left + col
        delta = min(flow.get((u, v), 0), flow.get((v, u), 0))
        if delta:
            flow[(u, v)] -= delta
            flow[(v, u)] -= delta
    return flow, value


def _walk_paths(graph: BipartiteGraph, flow: dict, source: int, sink: int, k: int):
    """Decompose the flow into k paths, zeroing cycles along the way."""

    def next_with_flow(u: int):
        for v in graph.adjacency[u]:
            if flow.get((u, v), 0) > 0:
                return v
        return None

    paths = []
    for _ in range(k):
        walk = [source]
        position = {source: 0}
        while walk[-1] != sink:
            u = walk[-1]
            v = next_with_flow(u)
            if v is None:
                raise RuntimeError("flow conservation violated during walk")
            if v in position:
                # cycle: zero its arcs and resume the walk from v
                start = position[v]
                cycle = walk[start:] + [v]
                for a, b in zip(cycle, cycle[1:]):
                    flow[(a, b)] -= 1
                for w in walk[start + 1:]:
                    del position[w]
                walk = walk[:start + 1]
            else:
                walk.append(v)
                position[v] = len(walk) - 1
        for a, b in zip(walk, walk[1:]):
            flow[(a, b)] -= 1
        paths.append(walk)
    return paths


def _to_index_sequence(vertices, n_left: int):
    """Global vertex ids -> alternating (row, col, row, ...) indices."""
    return tuple(v if s % 2 == 0 else v - n_left for s, v in enumerate(vertices))


def max_disjoint_paths(graph: BipartiteGraph, i: int, j: int) -> PathSet:
    """Maximum set of edge-disjoint paths from ``u_i`` to ``v_j``.

    Returns an empty set (k=0) when the pair is disconnected.
    """
    flow, value = _unit_max_flow(graph, i, j)
    if value == 0:
        return PathSet(paths=(), k=0, max_len=0, source=i, sink=j)
    walks = _walk_paths(graph, flow, i, graph.n_left + j, value)
    paths = tuple(_to_index_sequence(w, graph.n_left) for w in walks)
    max_len = max(len(p) - 1 for p in paths)
    return PathSet(paths=paths, k=value, max_len=max_len, source=i, sink=j)


def min_cut(graph: BipartiteGraph, i: int, j: int) -> CutCertificate:
    """Minimum edge cut separating ``u_i`` from ``v_j``.

    The left side is the set of vertices reachable from ``u_i`` in the
    residual graph of a maximum flow; the crossing edges are saturated and
    their count equals the max number of edge-disjoint paths.
    """
    source = i
    sink = graph.n_left + j
    flow, value = _unit_max_flow(graph, i, j)

    def residual(u: int, v: int) -> int:
        capacity = 0 if (v == source or u == sink) else 1
        return capacity - flow.get((u, v), 0) + flow.get((v, u), 0)

    reachable = {source}
    queue = deque([source])
    while queue:
        u = queue.popleft()
        for v in graph.adjacency[u]:
            if v not in reachable and residual(u, v) > 0:
                reachable.add(v)
                queue.append(v)

    cut_edges = []
    for row, col in graph.edges:
        u, v = row, graph.n_left + col
        if (u in reachable) != (v in reachable):
            cut_edges.append((row, col))
    if len(cut_edges) != value:
        raise RuntimeError(
            f"cut size {len(cut_edges)} disagrees with flow value {value}")
    return CutCertificate(left_side=frozenset(reachable),
                          cut_edges=tuple(sorted(cut_edges)))
