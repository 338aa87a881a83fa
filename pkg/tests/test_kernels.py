"""Backend parity: the numba kernels and the numpy fallback must agree
bit-for-bit, so trees built under either backend are identical."""

import numpy as np

from leveltree import _kernels
from leveltree._kernels import (
    _fiber_cross_numpy,
    _point_cross_numpy,
    _sweep_batch_py,
)


def test_point_cross_backends_bit_identical(rng):
    for d in (1, 2, 3, 7):
        a = rng.normal(size=(23, d))
        b = rng.normal(size=(31, d))
        assert np.array_equal(_kernels.point_cross(a, b), _point_cross_numpy(a, b))


def test_fiber_cross_backends_bit_identical(rng):
    lengths = rng.integers(2, 9, size=10)
    offsets = np.zeros(11, dtype=np.int64)
    offsets[1:] = np.cumsum(lengths)
    flat = rng.normal(size=(int(offsets[-1]), 3))
    for cutoff in (0.0, 0.7):
        jit = _kernels.fiber_cross(flat, offsets, flat, offsets, cutoff)
        fallback = _fiber_cross_numpy(flat, offsets, flat, offsets, cutoff)
        assert np.array_equal(jit, fallback)


def test_sweep_batch_backends_agree(rng):
    n = 60
    edges = set()
    while len(edges) < 120:
        i, j = sorted(rng.integers(0, n, size=2))
        if i != j:
            edges.add((int(i), int(j)))
    src = np.array([e[0] for e in edges] + [e[1] for e in edges])
    dst = np.array([e[1] for e in edges] + [e[0] for e in edges])
    order = np.argsort(src, kind="stable")
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(np.bincount(src, minlength=n), out=indptr[1:])
    indices = dst[order].astype(np.int64)

    batches = np.array_split(rng.permutation(n).astype(np.int64), 12)

    def run(sweep):
        parent = np.arange(n, dtype=np.int64)
        csize = np.ones(n, dtype=np.int64)
        active = np.zeros(n, dtype=np.uint8)
        seen = np.zeros(n, dtype=np.uint8)
        touched = np.empty(n, dtype=np.int64)
        log = []
        for batch in batches:
            nt = sweep(batch, parent, csize, active, seen, indptr, indices, touched)
            log.append(sorted(int(t) for t in touched[:nt]))
        return log, parent.copy()

    log_a, parent_a = run(_kernels.sweep_batch)
    log_b, parent_b = run(_sweep_batch_py)
    assert log_a == log_b
    roots_a = [_kernels.uf_find(parent_a, v) for v in range(n)]
    roots_b = [_kernels.uf_find(parent_b, v) for v in range(n)]
    assert roots_a == roots_b
