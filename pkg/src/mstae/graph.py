"""Complete Euclidean graphs, minimum spanning trees and graph similarities.

All matrices are dense; the package targets data sets of at most a few tens
of thousands of rows.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import cdist

from .data_io import DataMatrix


class GraphError(ValueError):
    pass


@dataclass(frozen=True)
class EdgeWeightedGraph:
    """Undirected graph as parallel edge arrays with ``i < j``."""

    n_vertices: int
    i: np.ndarray
    j: np.ndarray
    weight: np.ndarray

    def __post_init__(self):
        i = np.asarray(self.i, dtype=np.intp)
        j = np.asarray(self.j, dtype=np.intp)
        w = np.asarray(self.weight, dtype=float)
        if not (i.shape == j.shape == w.shape) or i.ndim != 1:
            raise GraphError("edge arrays must be 1-d and of equal length")
        if np.any(i >= j):
            raise GraphError("edges must satisfy i < j (no self-loops)")
        if i.size and (i.min() < 0 or j.max() >= self.n_vertices):
            raise GraphError("vertex id out of range")
        if not np.all(np.isfinite(w)) or np.any(w < 0):
            raise GraphError("edge weights must be finite and nonnegative")
        object.__setattr__(self, "i", i)
        object.__setattr__(self, "j", j)
        object.__setattr__(self, "weight", w)

    @classmethod
    def from_edges(cls, n_vertices, edges):
        """Build from ``(u, v, w)`` triples in any vertex order."""
        edges = [(min(u, v), max(u, v), w) for u, v, w in edges]
        if not edges:
            return cls(n_vertices, np.empty(0), np.empty(0), np.empty(0))
        a = np.array(edges, dtype=object)
        return cls(n_vertices, a[:, 0].astype(int), a[:, 1].astype(int), a[:, 2].astype(float))

    @property
    def edges(self):
        return list(zip(self.i.tolist(), self.j.tolist(), self.weight.tolist()))

    def adjacency(self) -> np.ndarray:
        """Dense weight matrix, ``inf`` where there is no edge; parallel edges keep the minimum."""
        a = np.full((self.n_vertices, self.n_vertices), np.inf)
        np.minimum.at(a, (self.i, self.j), self.weight)
        np.minimum.at(a, (self.j, self.i), self.weight)
        return a


@dataclass(frozen=True)
class SpanningTree:
    n_vertices: int
    edges: tuple  # ((i, j, w), ...) with i < j, in order of insertion by Prim
    total_weight: float

    def __post_init__(self):
        if len(self.edges) != self.n_vertices - 1:
            raise GraphError("a spanning tree has exactly n-1 edges")


@dataclass(frozen=True)
class GraphSimilarity:
    w: np.ndarray
    degree: np.ndarray
    laplacian: np.ndarray

    @classmethod
    def from_weights(cls, w):
        w = np.asarray(w, dtype=float)
        degree = w.sum(axis=1)
        return cls(w, degree, np.diag(degree) - w)


def pairwise_distances(x) -> np.ndarray:
    v = x.values if isinstance(x, DataMatrix) else np.asarray(x, dtype=float)
    return cdist(v, v)


def complete_graph(x: DataMatrix) -> EdgeWeightedGraph:
    """Every pair of rows joined by an edge weighted with their Euclidean distance."""
    m = x.m
    if m < 2:
        raise GraphError("need at least 2 observations")
    iu, ju = np.triu_indices(m, k=1)
    d = pairwise_distances(x)
    return EdgeWeightedGraph(m, iu, ju, d[iu, ju])


def prim_dense(weights: np.ndarray, start: int = 0):
    """Prim's algorithm on a dense symmetric weight matrix (``inf`` = no edge).

    Edges are compared by ``(weight, min(u, v), max(u, v))``, a strict total
    order, so the result is the unique MST under that order regardless of the
    start vertex. Returns ``(parent, order, edge_w)`` where ``order`` lists
    vertices in insertion order and ``edge_w[k]`` is the weight of the edge
    that attached ``order[k]`` (``edge_w[0] = 0``).
    """
    n = weights.shape[0]
    in_tree = np.zeros(n, dtype=bool)
    key = np.full(n, np.inf)
    parent = np.full(n, -1, dtype=np.intp)
    idx = np.arange(n)
    order = np.empty(n, dtype=np.intp)
    edge_w = np.zeros(n)

    u = start
    for step in range(n):
        in_tree[u] = True
        order[step] = u
        edge_w[step] = 0.0 if step == 0 else key[u]
        if step == n - 1:
            break
        row = weights[u]
        # candidate edge ids (lo, hi) for (u, v) against current (parent[v], v)
        lo_new = np.minimum(idx, u)
        hi_new = np.maximum(idx, u)
        lo_old = np.minimum(idx, parent)
        hi_old = np.maximum(idx, parent)
        better = (row < key) | (
            (row == key)
            & (np.isfinite(row))
            & ((lo_new < lo_old) | ((lo_new == lo_old) & (hi_new < hi_old)) | (parent < 0))
        )
        better &= ~in_tree
        key[better] = row[better]
        parent[better] = u

        cand = np.flatnonzero(~in_tree)
        kc = key[cand]
        kmin = kc.min()
        if not np.isfinite(kmin):
            raise GraphError("graph is disconnected")
        tied = cand[kc == kmin]
        if tied.size > 1:
            lo = np.minimum(tied, parent[tied])
            hi = np.maximum(tied, parent[tied])
            u = tied[np.lexsort((hi, lo))[0]]
        else:
            u = tied[0]
    return parent, order, edge_w


def _tree_from_prim(n, parent, order, edge_w) -> SpanningTree:
    edges = []
    for v, w in zip(order[1:], edge_w[1:]):
        p = parent[v]
        edges.append((int(min(p, v)), int(max(p, v)), float(w)))
    return SpanningTree(n, tuple(edges), float(np.sum(edge_w)))


def minimum_spanning_tree(g: EdgeWeightedGraph) -> SpanningTree:
    """MST of a connected graph; ties resolved by lexicographic edge id."""
    if g.n_vertices == 1:
        return SpanningTree(1, (), 0.0)
    parent, order, edge_w = prim_dense(g.adjacency())
    return _tree_from_prim(g.n_vertices, parent, order, edge_w)


def euclidean_mst(x) -> SpanningTree:
    """MST of the complete Euclidean graph, without materializing an edge list."""
    d = pairwise_distances(x)
    parent, order, edge_w = prim_dense(d)
    return _tree_from_prim(d.shape[0], parent, order, edge_w)


def tree_distances(t: SpanningTree) -> np.ndarray:
    """All-pairs path lengths in a tree.

    Vertices are visited breadth-first; a newly reached vertex ``v`` hangs off
    exactly one visited vertex ``u``, so its distance to every visited vertex
    is ``w(u, v)`` plus the distance from ``u``.
    """
    n = t.n_vertices
    nbrs = [[] for _ in range(n)]
    for i, j, w in t.edges:
        nbrs[i].append((j, w))
        nbrs[j].append((i, w))
    dist = np.zeros((n, n))
    seen = np.zeros(n, dtype=bool)
    seen[0] = True
    visited = np.zeros(n, dtype=np.intp)
    count, head = 1, 0
    while head < count:
        u = visited[head]
        head += 1
        for v, w in nbrs[u]:
            if seen[v]:
                continue
            cols = visited[:count]
            dist[v, cols] = dist[u, cols] + w
            dist[cols, v] = dist[v, cols]
            seen[v] = True
            visited[count] = v
            count += 1
    if count != n:
        raise GraphError("edge set does not span all vertices")
    return dist


def mst_distance_matrix(x) -> np.ndarray:
    return tree_distances(euclidean_mst(x))


def inverse_distance_similarity(dist: np.ndarray, zero_clamp: float = 1e-6) -> GraphSimilarity:
    """``W_ij = 1/D_ij``; coincident distinct points get ``1/zero_clamp``, diagonal 0."""
    if zero_clamp <= 0:
        raise GraphError("zero_clamp must be positive")
    dist = np.asarray(dist, dtype=float)
    pos = dist > 0
    w = np.full(dist.shape, 1.0 / zero_clamp)
    w[pos] = 1.0 / dist[pos]
    np.fill_diagonal(w, 0.0)
    return GraphSimilarity.from_weights(w)


def mst_similarity(m_dist: np.ndarray, zero_clamp: float = 1e-6) -> GraphSimilarity:
    """Similarity from tree-path distances: reciprocal where positive."""
    return inverse_distance_similarity(m_dist, zero_clamp)


def knn_index(x, k: int, return_distance: bool = False):
    """``m x k`` neighbor ids sorted by distance, ties by smaller id; self excluded."""
    v = x.values if isinstance(x, DataMatrix) else np.asarray(x, dtype=float)
    m = v.shape[0]
    if not 1 <= k < m:
        raise GraphError(f"k must satisfy 1 <= k < m (k={k}, m={m})")
    out = np.empty((m, k), dtype=np.intp)
    dist = np.empty((m, k))
    chunk = max(1, 4_000_000 // max(m, 1))
    for s in range(0, m, chunk):
        rows = np.arange(s, min(s + chunk, m))
        d = cdist(v[rows], v)
        d[np.arange(rows.size), rows] = np.inf
        # stable sort keeps smaller ids first among equal distances
        nn = np.argsort(d, axis=1, kind="stable")[:, :k]
        out[rows] = nn
        dist[rows] = np.take_along_axis(d, nn, axis=1)
    return (out, dist) if return_distance else out


def knn_heat_similarity(x, k: int = 5, bandwidth=None) -> GraphSimilarity:
    """Heat-kernel weights on the OR-symmetrized k-NN graph.

    ``bandwidth`` defaults to the mean squared distance to the k-th neighbor.
    """
    v = x.values if isinstance(x, DataMatrix) else np.asarray(x, dtype=float)
    m = v.shape[0]
    nn = knn_index(v, k)
    sq = cdist(v, v, "sqeuclidean")
    if bandwidth is None:
        bandwidth = float(np.mean(sq[np.arange(m), nn[:, -1]]))
        if bandwidth <= 0:
            bandwidth = 1.0
    if bandwidth <= 0:
        raise GraphError("bandwidth must be positive")
    adj = np.zeros((m, m), dtype=bool)
    adj[np.repeat(np.arange(m), k), nn.ravel()] = True
    adj |= adj.T
    np.fill_diagonal(adj, False)
    w = np.where(adj, np.exp(-sq / bandwidth), 0.0)
    return GraphSimilarity.from_weights(w)
