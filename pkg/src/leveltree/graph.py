"""Symmetric k-nearest-neighbor similarity graphs and their components.

An edge joins items i and j whenever ``dist(i, j) <= max(r_k(i), r_k(j))``,
i.e. whenever either endpoint lies within the other's k-NN radius (the
union rule, so the graph is symmetric by construction).
"""

from dataclasses import dataclass, field

import numpy as np

from .density import knn_radii, _block_size
from .errors import InvalidInputError


@dataclass
class NeighborGraph:
    """Undirected graph over n items plus the per-item k-NN radii."""

    n: int
    edges: np.ndarray  # (m, 2) int64, each row (i, j) with i < j
    radii: np.ndarray
    _indptr: np.ndarray = field(default=None, repr=False)
    _indices: np.ndarray = field(default=None, repr=False)

    def csr(self):
        """Adjacency in CSR form (both edge directions)."""
        if self._indptr is None:
            src = np.concatenate([self.edges[:, 0], self.edges[:, 1]])
            dst = np.concatenate([self.edges[:, 1], self.edges[:, 0]])
            order = np.argsort(src, kind="stable")
            counts = np.bincount(src, minlength=self.n)
            self._indptr = np.zeros(self.n + 1, dtype=np.int64)
            np.cumsum(counts, out=self._indptr[1:])
            self._indices = dst[order]
        return self._indptr, self._indices

    def neighbors(self, i: int) -> np.ndarray:
        indptr, indices = self.csr()
        return indices[indptr[i]:indptr[i + 1]]

    @property
    def edge_set(self):
        return {(int(i), int(j)) for i, j in self.edges}


@dataclass
class ComponentLabeling:
    """Connected components of an induced subgraph.

    ``labels[t]`` is the component id of ``active[t]``; ids are canonical:
    each component is labeled by its smallest member index.
    """

    active: np.ndarray
    labels: np.ndarray

    @property
    def n_components(self) -> int:
        return np.unique(self.labels).size

    def groups(self):
        """Mapping component id -> sorted member array."""
        out = {}
        for cid in np.unique(self.labels):
            out[int(cid)] = np.sort(self.active[self.labels == cid])
        return out


def knn_graph(dist, k: int, *, radii=None) -> NeighborGraph:
    """Build the union k-NN graph from a distance source.

    Parameters
    ----------
    dist : DistanceMatrix or streaming row source
        Anything exposing ``n`` and ``row_block(start, stop)``.
    k : int
        Neighborhood size, 1 <= k <= n-1.
    radii : ndarray, optional
        Precomputed k-NN radii (skips one pass over the distances).
    """
    n = dist.n
    if n < 2:
        raise InvalidInputError("need at least 2 items")
    if not (1 <= k <= n - 1):
        raise InvalidInputError(f"k={k} out of range [1, {n - 1}]")
    if radii is None:
        radii = knn_radii(dist, k)

    chunks = []
    step = _block_size(n)
    col = np.arange(n)
    for start in range(0, n, step):
        stop = min(start + step, n)
        rows = dist.row_block(start, stop)
        thresh = np.maximum(radii[start:stop, None], radii[None, :])
        mask = rows <= thresh
        # keep i < j only; the transpose pair is implied by symmetry
        mask &= col[None, :] > (np.arange(start, stop)[:, None])
        bi, j = np.nonzero(mask)
        chunks.append(np.stack([bi + start, j], axis=1))
    if chunks:
        edges = np.concatenate(chunks, axis=0).astype(np.int64)
    else:
        edges = np.empty((0, 2), dtype=np.int64)
    return NeighborGraph(n=n, edges=edges, radii=np.asarray(radii, dtype=np.float64))


def components(graph: NeighborGraph, active=None) -> ComponentLabeling:
    """Connected components of the subgraph induced by ``active``.

    With ``active=None`` the whole vertex set is used.
    """
    if active is None:
        active = np.arange(graph.n, dtype=np.int64)
    else:
        active = np.unique(np.asarray(active, dtype=np.int64))
        if active.size and (active[0] < 0 or active[-1] >= graph.n):
            raise InvalidInputError("active vertices out of range")
    indptr, indices = graph.csr()
    in_active = np.zeros(graph.n, dtype=bool)
    in_active[active] = True
    labels_full = np.full(graph.n, -1, dtype=np.int64)
    for v in active:
        v = int(v)
        if labels_full[v] != -1:
            continue
        # iterating in ascending order makes v the smallest member
        labels_full[v] = v
        stack = [v]
        while stack:
            u = stack.pop()
            for w in indices[indptr[u]:indptr[u + 1]]:
                w = int(w)
                if in_active[w] and labels_full[w] == -1:
                    labels_full[w] = v
                    stack.append(w)
    return ComponentLabeling(active=active, labels=labels_full[active])
