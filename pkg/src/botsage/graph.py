"""User-user similarity graph built from fused features alone.

An undirected edge joins users i < j whenever the cosine similarity of
their fused feature rows is >= tau.  Zero-norm rows have similarity 0 by
convention, so featureless users end up isolated instead of erroring.
Similarities are accumulated in float64 even for float32 inputs and
clamped to [-1, 1] to keep thresholding stable near |sim| ~ tau.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .errors import DataError, DimensionError, FormatError
from .features import FusedMatrix

_BLOCK = 512


def cosine_similarity(a: np.ndarray, b: np.ndarray) -> float:
    """Cosine of two vectors; zero-norm inputs give 0.0; output clamped to [-1, 1]."""
    a = np.asarray(a, dtype=np.float64).ravel()
    b = np.asarray(b, dtype=np.float64).ravel()
    if a.shape != b.shape:
        raise DimensionError(f"length mismatch: {a.shape[0]} vs {b.shape[0]}")
    if not (np.isfinite(a).all() and np.isfinite(b).all()):
        raise DataError("cosine_similarity inputs must be finite")
    na = np.sqrt(a @ a)
    nb = np.sqrt(b @ b)
    if na == 0.0 or nb == 0.0:
        return 0.0
    return float(np.clip((a @ b) / (na * nb), -1.0, 1.0))


class SimilarityGraph:
    """Symmetric, self-loop-free adjacency stored as sorted CSR neighbor lists."""

    def __init__(self, n: int, tau: float, indptr: np.ndarray, indices: np.ndarray):
        self.n = int(n)
        self.tau = float(tau)
        self.indptr = np.ascontiguousarray(indptr, dtype=np.int64)
        self.indices = np.ascontiguousarray(indices, dtype=np.int64)
        if self.indptr.shape != (self.n + 1,):
            raise DimensionError(f"indptr must have length n+1={self.n + 1}")

    @property
    def degrees(self) -> np.ndarray:
        return np.diff(self.indptr)

    @property
    def edge_count(self) -> int:
        return int(self.indices.shape[0] // 2)

    def neighbors(self, i: int) -> np.ndarray:
        """Sorted neighbor ids of node i (a view, do not mutate)."""
        return self.indices[self.indptr[i] : self.indptr[i + 1]]

    def edge_array(self) -> np.ndarray:
        """All edges as an (E, 2) array with i < j, sorted lexicographically."""
        src = np.repeat(np.arange(self.n, dtype=np.int64), self.degrees)
        keep = src < self.indices
        return np.column_stack([src[keep], self.indices[keep]])

    def edge_set(self) -> set[tuple[int, int]]:
        return {(int(i), int(j)) for i, j in self.edge_array()}

    def to_dense(self) -> np.ndarray:
        """Dense boolean adjacency, for debugging and small-n checks."""
        dense = np.zeros((self.n, self.n), dtype=bool)
        edges = self.edge_array()
        if len(edges):
            dense[edges[:, 0], edges[:, 1]] = True
            dense[edges[:, 1], edges[:, 0]] = True
        return dense

    def __eq__(self, other) -> bool:
        if not isinstance(other, SimilarityGraph):
            return NotImplemented
        return (
            self.n == other.n
            and self.tau == other.tau
            and np.array_equal(self.indptr, other.indptr)
            and np.array_equal(self.indices, other.indices)
        )


@dataclass(frozen=True)
class GraphStats:
    """Connectivity summary used by the threshold-sweep analysis."""

    n: int
    edge_count: int
    density: float
    isolated_node_count: int
    degree_histogram: dict[int, int] = field(compare=True)
    connected_component_count: int = 0


def _as_matrix(features: FusedMatrix | np.ndarray) -> np.ndarray:
    if isinstance(features, FusedMatrix):
        return features.data
    matrix = np.ascontiguousarray(features, dtype=np.float64)
    if matrix.ndim != 2:
        raise DimensionError(f"feature matrix must be 2-D, got shape {matrix.shape}")
    return matrix


def _safe_norms(matrix: np.ndarray) -> np.ndarray:
    norms = np.sqrt(np.einsum("ij,ij->i", matrix, matrix))
    return np.where(norms == 0.0, 1.0, norms)


def _graph_from_pairs(n: int, tau: float, src: np.ndarray, dst: np.ndarray) -> SimilarityGraph:
    """Assemble CSR adjacency from i<j edge endpoints (both directions stored)."""
    both_src = np.concatenate([src, dst])
    both_dst = np.concatenate([dst, src])
    order = np.lexsort((both_dst, both_src))
    both_src = both_src[order]
    both_dst = both_dst[order]
    degrees = np.bincount(both_src, minlength=n)
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(degrees, out=indptr[1:])
    return SimilarityGraph(n=n, tau=tau, indptr=indptr, indices=both_dst)


def build_graph(features: FusedMatrix | np.ndarray, tau: float) -> SimilarityGraph:
    """Threshold pairwise cosine similarity into an undirected graph.

    Equivalent to the brute-force scan over all i < j pairs; computed in
    row blocks so large N stays memory-bounded.
    """
    matrix = _as_matrix(features)
    n = matrix.shape[0]
    if n < 1:
        raise DataError("need at least one row to build a graph")
    if not -1.0 <= tau <= 1.0:
        raise ValueError(f"tau must be in [-1, 1], got {tau}")
    if not np.isfinite(matrix).all():
        raise DataError("feature matrix contains NaN or Inf")

    norms = _safe_norms(matrix)
    src_parts, dst_parts = [], []
    for start in range(0, n, _BLOCK):
        stop = min(start + _BLOCK, n)
        sims = (matrix[start:stop] @ matrix.T) / np.outer(norms[start:stop], norms)
        np.clip(sims, -1.0, 1.0, out=sims)
        hits = sims >= tau
        # keep only j > i so every undirected edge is found exactly once
        cols = np.arange(n)
        hits &= cols[None, :] > (np.arange(start, stop))[:, None]
        rows, cols_hit = np.nonzero(hits)
        src_parts.append(rows + start)
        dst_parts.append(cols_hit)
    src = np.concatenate(src_parts) if src_parts else np.zeros(0, dtype=np.int64)
    dst = np.concatenate(dst_parts) if dst_parts else np.zeros(0, dtype=np.int64)
    return _graph_from_pairs(n, tau, src, dst)


def graph_stats(g: SimilarityGraph) -> GraphStats:
    """Exact edge/degree/component counts for one graph."""
    degrees = g.degrees
    histogram = {int(k): int(v) for k, v in zip(*np.unique(degrees, return_counts=True))}
    return GraphStats(
        n=g.n,
        edge_count=g.edge_count,
        density=(2.0 * g.edge_count / (g.n * (g.n - 1))) if g.n >= 2 else 0.0,
        isolated_node_count=int((degrees == 0).sum()),
        degree_histogram=histogram,
        connected_component_count=_count_components(g),
    )


def _count_components(g: SimilarityGraph) -> int:
    visited = np.zeros(g.n, dtype=bool)
    components = 0
    for start in range(g.n):
        if visited[start]:
            continue
        components += 1
        visited[start] = True
        queue = deque([start])
        while queue:
            node = queue.popleft()
            for nb in g.neighbors(node):
                if not visited[nb]:
                    visited[nb] = True
                    queue.append(int(nb))
    return components


def sweep_threshold(
    features: FusedMatrix | np.ndarray, taus: list[float]
) -> list[tuple[float, GraphStats]]:
    """Stats per threshold from one similarity pass (similarities computed once)."""
    if len(taus) == 0:
        raise ValueError("taus must be non-empty")
    for tau in taus:
        if not -1.0 <= tau <= 1.0:
            raise ValueError(f"tau must be in [-1, 1], got {tau}")
    matrix = _as_matrix(features)
    n = matrix.shape[0]
    if n < 1:
        raise DataError("need at least one row to sweep thresholds")
    if not np.isfinite(matrix).all():
        raise DataError("feature matrix contains NaN or Inf")

    norms = _safe_norms(matrix)
    per_tau: list[tuple[list, list]] = [([], []) for _ in taus]
    cols = np.arange(n)
    for start in range(0, n, _BLOCK):
        stop = min(start + _BLOCK, n)
        sims = (matrix[start:stop] @ matrix.T) / np.outer(norms[start:stop], norms)
        np.clip(sims, -1.0, 1.0, out=sims)
        upper = cols[None, :] > (np.arange(start, stop))[:, None]
        for k, tau in enumerate(taus):
            rows, cols_hit = np.nonzero((sims >= tau) & upper)
            per_tau[k][0].append(rows + start)
            per_tau[k][1].append(cols_hit)

    out = []
    for k, tau in enumerate(taus):
        src = np.concatenate(per_tau[k][0]) if per_tau[k][0] else np.zeros(0, dtype=np.int64)
        dst = np.concatenate(per_tau[k][1]) if per_tau[k][1] else np.zeros(0, dtype=np.int64)
        out.append((float(tau), graph_stats(_graph_from_pairs(n, float(tau), src, dst))))
    return out


# ---------------------------------------------------------------------------
# text edge-list export (cross-implementation diffing)
# ---------------------------------------------------------------------------


def save_graph(g: SimilarityGraph, path) -> None:
    """Write `N`, `tau`, then one `i j` line per edge (i < j, ascending)."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"{g.n}\n{g.tau!r}\n")
        for i, j in g.edge_array():
            fh.write(f"{i} {j}\n")


def load_graph(path) -> SimilarityGraph:
    """Read a graph saved by save_graph."""
    with open(path, encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    if len(lines) < 2:
        raise FormatError(f"{path}: graph file needs at least N and tau lines")
    try:
        n = int(lines[0])
        tau = float(lines[1])
    except ValueError as exc:
        raise DataError(f"{path}: bad graph header ({exc})") from exc
    src_list, dst_list = [], []
    for lineno, line in enumerate(lines[2:], 3):
        if not line.strip():
            continue
        try:
            i_s, j_s = line.split()
            i, j = int(i_s), int(j_s)
        except ValueError as exc:
            raise DataError(f"{path}:{lineno}: expected 'i j'") from exc
        if not (0 <= i < j < n):
            raise DataError(f"{path}:{lineno}: edge ({i}, {j}) out of range for n={n}")
        src_list.append(i)
        dst_list.append(j)
    src = np.asarray(src_list, dtype=np.int64)
    dst = np.asarray(dst_list, dtype=np.int64)
    return _graph_from_pairs(n, tau, src, dst)
