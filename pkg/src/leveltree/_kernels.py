"""Hot numeric kernels: numba-compiled with a pure numpy/Python fallback.

The jitted path is the default. Setting the environment variable
``LEVELTREE_NO_NUMBA=1`` (before import) selects the fallback path, which
produces bit-identical results; ``benchmarks/kernel_bench.py`` compares the
two. Both paths accumulate sums in a fixed order, so outputs do not depend
on the backend or on the numba thread count.
"""

import math
import os

import numpy as np


def _numba_disabled() -> bool:
    flag = os.environ.get("LEVELTREE_NO_NUMBA", "")
    return flag.strip().lower() in {"1", "true", "yes", "on"}


NUMBA_ENABLED = False
if not _numba_disabled():
    try:
        from numba import njit, prange, set_num_threads as _numba_set_threads

        NUMBA_ENABLED = True
    except ImportError:  # pragma: no cover - numba is a hard dependency
        pass


def backend() -> str:
    """Name of the active kernel backend, ``"numba"`` or ``"numpy"``."""
    return "numba" if NUMBA_ENABLED else "numpy"


def set_threads(n: int) -> None:
    """Limit numba's worker threads. No-op on the fallback backend."""
    if NUMBA_ENABLED and n > 0:
        _numba_set_threads(n)


# ---------------------------------------------------------------------------
# Point-cloud distances
# ---------------------------------------------------------------------------

def _point_cross_numpy(a, b):
    # Accumulate one coordinate at a time so the summation order matches the
    # jitted kernel exactly.
    sq = np.zeros((a.shape[0], b.shape[0]))
    for c in range(a.shape[1]):
        diff = a[:, c, None] - b[None, :, c]
        sq += diff * diff
    return np.sqrt(sq)


# ---------------------------------------------------------------------------
# Fiber (polyline) distances
#
# Polylines are stored flattened: ``flat`` is a (total_vertices, 3) array and
# ``offsets[i]:offsets[i+1]`` is the vertex range of fiber i.
# ---------------------------------------------------------------------------

def _fiber_directional_numpy(a, b, cutoff):
    sq = np.zeros((a.shape[0], b.shape[0]))
    for c in range(3):
        diff = a[:, c, None] - b[None, :, c]
        sq += diff * diff
    mins = np.sqrt(sq.min(axis=1))
    total = 0.0
    count = 0
    for v in mins:  # sequential, matching the jitted accumulation order
        v = float(v)
        if v > cutoff:
            total += v
            count += 1
    return total / count if count else 0.0


def _fiber_pair_numpy(a, b, cutoff):
    fwd = _fiber_directional_numpy(a, b, cutoff)
    rev = _fiber_directional_numpy(b, a, cutoff)
    return fwd if fwd > rev else rev


def _fiber_cross_numpy(flat_a, off_a, flat_b, off_b, cutoff):
    na = off_a.shape[0] - 1
    nb = off_b.shape[0] - 1
    out = np.empty((na, nb))
    for i in range(na):
        u = flat_a[off_a[i]:off_a[i + 1]]
        for j in range(nb):
            w = flat_b[off_b[j]:off_b[j + 1]]
            out[i, j] = _fiber_pair_numpy(u, w, cutoff)
    return out


# ---------------------------------------------------------------------------
# Union-find sweep used by the tree builder
#
# Points are activated in batches of equal density, highest first. For each
# batch the kernel records which pre-batch components touch the batch (their
# union-find roots), then activates the batch and unions every edge with two
# active endpoints. ``seen`` is scratch space that must be all zeros between
# calls; the kernel restores it.
# ---------------------------------------------------------------------------

def _uf_find_py(parent, x):
    root = x
    while parent[root] != root:
        root = parent[root]
    while parent[x] != root:
        parent[x], x = root, parent[x]
    return root


def _uf_union_py(parent, csize, a, b):
    ra = _uf_find_py(parent, a)
    rb = _uf_find_py(parent, b)
    if ra == rb:
        return
    if csize[ra] < csize[rb] or (csize[ra] == csize[rb] and rb < ra):
        ra, rb = rb, ra
    parent[rb] = ra
    csize[ra] += csize[rb]


def _sweep_batch_py(batch, parent, csize, active, seen, indptr, indices, touched):
    nt = 0
    for p in batch:
        p = int(p)
        for e in range(indptr[p], indptr[p + 1]):
            q = int(indices[e])
            if active[q]:
                r = _uf_find_py(parent, q)
                if not seen[r]:
                    seen[r] = 1
                    touched[nt] = r
                    nt += 1
    for p in batch:
        active[int(p)] = 1
    for p in batch:
        p = int(p)
        for e in range(indptr[p], indptr[p + 1]):
            q = int(indices[e])
            if active[q]:
                _uf_union_py(parent, csize, p, q)
    for t in range(nt):
        seen[touched[t]] = 0
    return nt


def uf_find(parent, x: int) -> int:
    """Find with path halving on a numpy parent array (Python side)."""
    x = int(x)
    root = x
    while parent[root] != root:
        root = int(parent[root])
    while parent[x] != root:
        nxt = int(parent[x])
        parent[x] = root
        x = nxt
    return root


if NUMBA_ENABLED:

    @njit(cache=True, parallel=True)
    def _point_cross_numba(a, b):  # pragma: no cover - exercised via dispatch
        na, d = a.shape
        nb = b.shape[0]
        out = np.empty((na, nb))
        for i in prange(na):
            for j in range(nb):
                acc = 0.0
                for c in range(d):
                    diff = a[i, c] - b[j, c]
                    acc += diff * diff
                out[i, j] = math.sqrt(acc)
        return out

    @njit(cache=True)
    def _fiber_directional_numba(flat_a, s0, e0, flat_b, s1, e1, cutoff):
        total = 0.0
        count = 0
        for i in range(s0, e0):
            best = np.inf
            for j in range(s1, e1):
                dx = flat_a[i, 0] - flat_b[j, 0]
                dy = flat_a[i, 1] - flat_b[j, 1]
                dz = flat_a[i, 2] - flat_b[j, 2]
                sq = dx * dx + dy * dy + dz * dz
                if sq < best:
                    best = sq
            d = math.sqrt(best)
            if d > cutoff:
                total += d
                count += 1
        return total / count if count > 0 else 0.0

    @njit(cache=True)
    def _fiber_pair_flat_numba(flat_a, s0, e0, flat_b, s1, e1, cutoff):
        fwd = _fiber_directional_numba(flat_a, s0, e0, flat_b, s1, e1, cutoff)
        rev = _fiber_directional_numba(flat_b, s1, e1, flat_a, s0, e0, cutoff)
        return fwd if fwd > rev else rev

    @njit(cache=True, parallel=True)
    def _fiber_cross_numba(flat_a, off_a, flat_b, off_b, cutoff):
        na = off_a.shape[0] - 1
        nb = off_b.shape[0] - 1
        out = np.empty((na, nb))
        for i in prange(na):
            for j in range(nb):
                out[i, j] = _fiber_pair_flat_numba(
                    flat_a, off_a[i], off_a[i + 1], flat_b, off_b[j], off_b[j + 1], cutoff
                )
        return out

    @njit(cache=True)
    def _uf_find_numba(parent, x):
        root = x
        while parent[root] != root:
            root = parent[root]
        while parent[x] != root:
            nxt = parent[x]
            parent[x] = root
            x = nxt
        return root

    @njit(cache=True)
    def _sweep_batch_numba(batch, parent, csize, active, seen, indptr, indices, touched):
        nt = 0
        for bi in range(batch.shape[0]):
            p = batch[bi]
            for e in range(indptr[p], indptr[p + 1]):
                q = indices[e]
                if active[q] == 1:
                    r = _uf_find_numba(parent, q)
                    if seen[r] == 0:
                        seen[r] = 1
                        touched[nt] = r
                        nt += 1
        for bi in range(batch.shape[0]):
            active[batch[bi]] = 1
        for bi in range(batch.shape[0]):
            p = batch[bi]
            for e in range(indptr[p], indptr[p + 1]):
                q = indices[e]
                if active[q] == 1:
                    ra = _uf_find_numba(parent, p)
                    rb = _uf_find_numba(parent, q)
                    if ra != rb:
                        if csize[ra] < csize[rb] or (csize[ra] == csize[rb] and rb < ra):
                            ra, rb = rb, ra
                        parent[rb] = ra
                        csize[ra] += csize[rb]
        for t in range(nt):
            seen[touched[t]] = 0
        return nt

    point_cross = _point_cross_numba
    sweep_batch = _sweep_batch_numba

    def fiber_pair(u, w, cutoff):
        return float(
            _fiber_pair_flat_numba(u, 0, u.shape[0], w, 0, w.shape[0], cutoff)
        )

    fiber_cross = _fiber_cross_numba
else:
    point_cross = _point_cross_numpy
    sweep_batch = _sweep_batch_py

    def fiber_pair(u, w, cutoff):
        return float(_fiber_pair_numpy(u, w, cutoff))

    fiber_cross = _fiber_cross_numpy


def warmup() -> None:
    """Trigger jit compilation on tiny inputs (no-op on the fallback)."""
    if not NUMBA_ENABLED:
        return
    pts = np.zeros((2, 3))
    point_cross(pts, pts)
    flat = np.zeros((4, 3))
    off = np.array([0, 2, 4], dtype=np.int64)
    fiber_cross(flat, off, flat, off, 0.0)
    parent = np.arange(2, dtype=np.int64)
    csize = np.ones(2, dtype=np.int64)
    active = np.zeros(2, dtype=np.uint8)
    seen = np.zeros(2, dtype=np.uint8)
    touched = np.empty(2, dtype=np.int64)
    indptr = np.array([0, 1, 2], dtype=np.int64)
    indices = np.array([1, 0], dtype=np.int64)
    sweep_batch(np.array([0], dtype=np.int64), parent, csize, active, seen,
                indptr, indices, touched)
    sweep_batch(np.array([1], dtype=np.int64), parent, csize, active, seen,
                indptr, indices, touched)
