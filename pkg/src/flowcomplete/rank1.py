"""Ratio-on-path estimation for rank-1 matrices.

Along a connecting path, the product of row-to-column observations divided
by the product of column-to-row observations telescopes to the target
product of factors.  Multiple edge-disjoint paths are combined by a
stabilized ratio of averages: the numerator collects ``alpha * beta`` per
path and the denominator ``beta**2``, which keeps the denominator bounded
away from zero with high probability once enough paths are available.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import (
    DegenerateDenominatorError,
    DisconnectedPairError,
    InvalidPathError,
    NoPathError,
)
from .graph import ObservationMask, build_graph, validate_path
from .maxflow import PathSet, max_disjoint_paths, min_cut

DENOMINATOR_FLOOR = 1e-12


@dataclass(frozen=True)
class RankOneModel:
    """Latent factors of a rank-1 matrix: ``M[i, j] = a[i] * b[j]``."""

    row_factors: np.ndarray
    col_factors: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "row_factors",
                           np.asarray(self.row_factors, dtype=float))
        object.__setattr__(self, "col_factors",
                           np.asarray(self.col_factors, dtype=float))

    def matrix(self) -> np.ndarray:
        return np.outer(self.row_factors, self.col_factors)

    def entry(self, i: int, j: int) -> float:
        return float(self.row_factors[i] * self.col_factors[j])


@dataclass(frozen=True)
class PathStatistics:
    """Forward and backward observation products along one path."""

    alpha: float
    beta: float
    length: int


@dataclass(frozen=True)
class Rank1Report:
    """Per-entry ratio estimates with path-count certificates.

    ``estimates`` is ``nan`` where the entry is unidentifiable (no path) or
    where the denominator collapsed; the two cases are told apart by
    ``identifiable`` and ``degenerate``.
    """

    estimates: np.ndarray
    identifiable: np.ndarray
    path_counts: np.ndarray
    max_lens: np.ndarray
    degenerate: np.ndarray


def path_alpha_beta(path, data, mask: ObservationMask | None = None) -> PathStatistics:
    """Products of forward (row->col) and backward (col->row) observations.

    A length-1 path has an empty backward product, so ``beta == 1``.
    """
    if mask is not None:
        validate_path(path, mask)
    elif len(path) < 2 or len(path) % 2 != 0:
        raise InvalidPathError("path must have an odd number of edges")
    arr = np.asarray(data, dtype=float)
    alpha = 1.0
    for s in range(0, len(path) - 1, 2):
        alpha *= arr[path[s], path[s + 1]]
    beta = 1.0
    for s in range(2, len(path) - 1, 2):
        beta *= arr[path[s], path[s - 1]]
    return PathStatistics(alpha=float(alpha), beta=float(beta),
                          length=len(path) - 1)


def rank1_entry(mask: ObservationMask, data, i: int, j: int,
                path_set: PathSet) -> float:
    """Stabilized multi-path ratio estimate of entry ``(i, j)``.

    Raises :class:`NoPathError` when the path set is empty and
    :class:`DegenerateDenominatorError` when the averaged squared backward
    product falls below ``DENOMINATOR_FLOOR``.
    """
    if path_set.k == 0:
        raise NoPathError(f"no connecting path for entry {(i, j)}")
    if path_set.source != i or path_set.sink != j:
        raise ValueError("path set endpoints do not match the requested entry")
    stats = [path_alpha_beta(path, data, mask) for path in path_set.paths]
    numerator = sum(s.alpha * s.beta for s in stats) / path_set.k
    denominator = sum(s.beta ** 2 for s in stats) / path_set.k
    if denominator < DENOMINATOR_FLOOR:
        raise DegenerateDenominatorError(
            f"denominator {denominator:.3e} below {DENOMINATOR_FLOOR} "
            f"for entry {(i, j)}")
    return float(numerator / denominator)


def rank1_full(mask: ObservationMask, data, threads: int | None = None) -> Rank1Report:
    """Ratio estimates of every entry, with per-entry (k, max_len) recorded.

    Path sets are computed independently per entry from the same graph.
    """
    graph = build_graph(mask)
    n, m = mask.n_rows, mask.n_cols
    estimates = np.full((n, m), np.nan)
    identifiable = np.zeros((n, m), dtype=bool)
    path_counts = np.zeros((n, m), dtype=int)
    max_lens = np.zeros((n, m), dtype=int)
    degenerate = np.zeros((n, m), dtype=bool)

    def solve(entry):
        i, j = entry
        return i, j, max_disjoint_paths(graph, i, j)

    entries = [(i, j) for i in range(n) for j in range(m)]
    if threads and threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            solved = list(pool.map(solve, entries))
    else:
        solved = [solve(entry) for entry in entries]

    for i, j, path_set in solved:
        path_counts[i, j] = path_set.k
        max_lens[i, j] = path_set.max_len
        if path_set.k == 0:
            continue
        identifiable[i, j] = True
        try:
            estimates[i, j] = rank1_entry(mask, data, i, j, path_set)
        except DegenerateDenominatorError:
            degenerate[i, j] = True
    return Rank1Report(estimates=estimates, identifiable=identifiable,
                       path_counts=path_counts, max_lens=max_lens,
                       degenerate=degenerate)


def rank1_error_bound(k: int, max_len: int, sigma: float, m_inf: float,
                      n_rows: int, n_cols: int, delta: float,
                      constant: float = 1.0) -> float:
    """High-probability error bound for the multi-path ratio estimate.

    Evaluates ``C * sigma**L * (1 + m_inf**L) * sqrt(2**L *
    log(nm/delta)**(L+1) / K)``; the leading constant is caller-supplied.
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    if not 0 < delta < 1:
        raise ValueError("delta must lie in (0, 1)")
    log_term = math.log(n_rows * n_cols / delta)
    return float(constant * sigma ** max_len * (1.0 + m_inf ** max_len)
                 * math.sqrt(2.0 ** max_len * log_term ** (max_len + 1) / k))


def hard_instance_rank1(mask: ObservationMask, i: int, j: int,
                        epsilon: float) -> tuple[RankOneModel, RankOneModel]:
    """Pair of rank-1 models separated only across a minimum cut.

    The first model has all factors ``epsilon``; the second flips the sign
    of every factor on the far side of a minimum (i, j) edge cut.  The two
    models agree on every observed entry except the cut edges (one per
    disjoint path) and still differ at the target entry.
    """
    if not 0 < epsilon < 1:
        raise ValueError("epsilon must lie in (0, 1)")
    graph = build_graph(mask)
    certificate = min_cut(graph, i, j)
    if not certificate.cut_edges:
        raise DisconnectedPairError(
            f"row {i} and column {j} are not connected")
    n, m = mask.n_rows, mask.n_cols
    base = RankOneModel(row_factors=np.full(n, epsilon),
                        col_factors=np.full(m, epsilon))
    row_signs = np.array([1.0 if v in certificate.left_side else -1.0
                          for v in range(n)])
    col_signs = np.array([1.0 if (n + t) in certificate.left_side else -1.0
                          for t in range(m)])
    flipped = RankOneModel(row_factors=epsilon * row_signs,
                           col_factors=epsilon * col_signs)
    return base, flipped
