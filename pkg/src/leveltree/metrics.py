"""Distance computations for point clouds and fiber tracks.

Two metrics are supported: the Euclidean metric on points in R^d, and a
directional match distance on 3-D polylines ("fibers"): every vertex of one
fiber is matched to its closest vertex on the other, the matched distances
above a cutoff are averaged, and the larger of the two directional averages
is returned. The fiber distance is symmetric but is not a metric (the
triangle inequality can fail).
"""

import math

import numpy as np

from . import _kernels
from .errors import InvalidInputError

#: Largest item count for which a full distance matrix is materialized.
#: Above the cap, rows are computed on demand.
DEFAULT_DENSE_CAP = 25_000


class PointCloud:
    """n points in R^d with stable integer identities (row index)."""

    def __init__(self, points):
        pts = np.asarray(points, dtype=np.float64)
        if pts.ndim != 2 or pts.shape[0] < 1 or pts.shape[1] < 1:
            raise InvalidInputError("points must be a non-empty 2-D array")
        if not np.all(np.isfinite(pts)):
            raise InvalidInputError("points must have finite coordinates")
        self.points = pts

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def dim(self) -> int:
        return self.points.shape[1]


class FiberSet:
    """n polylines in R^3, each an ordered sequence of at least 2 vertices."""

    def __init__(self, fibers):
        cleaned = []
        for i, fib in enumerate(fibers):
            arr = np.asarray(fib, dtype=np.float64)
            if arr.ndim != 2 or arr.shape[1] != 3:
                raise InvalidInputError(f"fiber {i} is not a sequence of 3-D vertices")
            if arr.shape[0] < 2:
                raise InvalidInputError(f"fiber {i} has fewer than 2 vertices")
            if not np.all(np.isfinite(arr)):
                raise InvalidInputError(f"fiber {i} has non-finite vertices")
            cleaned.append(arr)
        if not cleaned:
            raise InvalidInputError("fiber set is empty")
        self.fibers = cleaned
        self._flat = None
        self._offsets = None

    @property
    def n(self) -> int:
        return len(self.fibers)

    def flattened(self):
        """Return (flat_vertices, offsets) for kernel consumption."""
        if self._flat is None:
            self._offsets = np.zeros(self.n + 1, dtype=np.int64)
            self._offsets[1:] = np.cumsum([f.shape[0] for f in self.fibers])
            self._flat = np.concatenate(self.fibers, axis=0)
        return self._flat, self._offsets


class DistanceMatrix:
    """Dense symmetric distance matrix with zero diagonal."""

    def __init__(self, values, validate=True):
        vals = np.asarray(values, dtype=np.float64)
        if vals.ndim != 2 or vals.shape[0] != vals.shape[1]:
            raise InvalidInputError("distance matrix must be square")
        if validate:
            if not np.all(np.isfinite(vals)):
                raise InvalidInputError("distance matrix has non-finite entries")
            if np.any(vals < 0):
                raise InvalidInputError("distance matrix has negative entries")
            if np.any(np.diag(vals) != 0):
                raise InvalidInputError("distance matrix has a nonzero diagonal")
            if not np.array_equal(vals, vals.T):
                raise InvalidInputError("distance matrix is not symmetric")
        self.values = vals

    @property
    def n(self) -> int:
        return self.values.shape[0]

    def row_block(self, start: int, stop: int):
        return self.values[start:stop]


class StreamingDistanceMatrix:
    """Row-on-demand distance source for item counts above the dense cap."""

    def __init__(self, n, row_block_fn):
        self.n = n
        self._row_block_fn = row_block_fn

    def row_block(self, start: int, stop: int):
        return self._row_block_fn(start, stop)


def euclidean(a, b) -> float:
    """L2 distance between two coordinate vectors of equal dimension."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.ndim != 1 or b.ndim != 1 or a.shape != b.shape:
        raise InvalidInputError("coordinate vectors must share one dimension")
    if not (np.all(np.isfinite(a)) and np.all(np.isfinite(b))):
        raise InvalidInputError("coordinates must be finite")
    acc = 0.0
    for c in range(a.shape[0]):
        diff = a[c] - b[c]
        acc += diff * diff
    return math.sqrt(acc)


def fiber_distance(u, w, cutoff: float = 0.0) -> float:
    """Directional match distance between two polylines.

    For each vertex of ``u`` the minimum distance to any vertex of ``w`` is
    found; the minima exceeding ``cutoff`` are averaged (0 if none exceed
    it). The same is done with roles swapped, and the maximum of the two
    directional averages is returned. Symmetric in (u, w).
    """
    u = np.ascontiguousarray(u, dtype=np.float64)
    w = np.ascontiguousarray(w, dtype=np.float64)
    for name, f in (("u", u), ("w", w)):
        if f.ndim != 2 or f.shape[1] != 3 or f.shape[0] < 1:
            raise InvalidInputError(f"polyline {name} must be a non-empty (r, 3) array")
        if not np.all(np.isfinite(f)):
            raise InvalidInputError(f"polyline {name} has non-finite vertices")
    if cutoff < 0:
        raise InvalidInputError("cutoff must be nonnegative")
    return _kernels.fiber_pair(u, w, float(cutoff))


def _point_row_block(points):
    def rows(start, stop):
        block = _kernels.point_cross(points[start:stop], points)
        for i in range(start, stop):
            block[i - start, i] = 0.0
        return block

    return rows


def pairwise_distances(data, metric: str = "auto", *, cutoff: float = 0.0,
                       dense_cap: int = DEFAULT_DENSE_CAP):
    """All pairwise distances under the metric implied by the data type.

    Returns a :class:`DistanceMatrix` when ``n <= dense_cap`` and a
    :class:`StreamingDistanceMatrix` (rows computed on demand) otherwise.
    """
    if isinstance(data, PointCloud):
        if metric not in ("auto", "euclidean"):
            raise InvalidInputError(f"metric {metric!r} does not apply to point clouds")
        n = data.n
        if n < 2:
            raise InvalidInputError("need at least 2 items for pairwise distances")
        rows = _point_row_block(data.points)
    elif isinstance(data, FiberSet):
        if metric not in ("auto", "fiber"):
            raise InvalidInputError(f"metric {metric!r} does not apply to fiber sets")
        n = data.n
        if n < 2:
            raise InvalidInputError("need at least 2 items for pairwise distances")
        flat, offsets = data.flattened()

        def rows(start, stop):
            sub_off = offsets[start:stop + 1] - offsets[start]
            sub_flat = flat[offsets[start]:offsets[stop]]
            return _kernels.fiber_cross(sub_flat, sub_off, flat, offsets, float(cutoff))

    else:
        raise InvalidInputError("data must be a PointCloud or FiberSet")

    if n <= dense_cap:
        values = rows(0, n)
        return DistanceMatrix(values, validate=False)
    return StreamingDistanceMatrix(n, rows)
