"""k-nearest-neighbor density estimation.

For points the estimate at item j is ``k / (n * v_d * r_k(j)^d)`` where
``r_k(j)`` is the distance to the k-th nearest other item and ``v_d`` the
volume of the Euclidean unit ball in R^d. For fibers the same construction
is used with the fiber distance, the unit-ball volume dropped and the
exponent fixed at 1; the result is a pseudo-density that orders items by
proximity to their neighbors but carries no probability interpretation
(deliberately left unnormalized).
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError
from .metrics import FiberSet, PointCloud, pairwise_distances

#: Relative bump applied to duplicate items (k-NN radius zero), which would
#: otherwise have undefined density: they get the maximum finite density in
#: the sample times (1 + 2**-20), so they enter every upper level set first.
DUPLICATE_BUMP = 1.0 + 2.0 ** -20


def unit_ball_volume(d: int) -> float:
    """Volume of the unit ball in R^d (exact closed forms for d <= 3)."""
    if d < 1:
        raise InvalidInputError("dimension must be >= 1")
    exact = {1: 2.0, 2: math.pi, 3: 4.0 * math.pi / 3.0}
    if d in exact:
        return exact[d]
    # v_d = v_{d-2} * 2*pi/d
    v, start = (exact[2], 2) if d % 2 == 0 else (exact[1], 1)
    for m in range(start + 2, d + 1, 2):
        v *= 2.0 * math.pi / m
    return v


@dataclass
class DensityEstimate:
    """Per-item density (or pseudo-density) values and the k used."""

    values: np.ndarray
    k: int
    kind: str = "density"

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64)
        n = self.values.shape[0]
        if self.values.ndim != 1 or n < 2:
            raise InvalidInputError("density values must be a 1-D array of >= 2 items")
        if not (1 <= self.k <= n - 1):
            raise InvalidInputError(f"k={self.k} out of range [1, {n - 1}]")
        if self.kind not in ("density", "pseudo-density"):
            raise InvalidInputError(f"unknown density kind {self.kind!r}")
        if not np.all(np.isfinite(self.values)) or np.any(self.values <= 0):
            raise InvalidInputError("density values must be finite and positive")

    @property
    def n(self) -> int:
        return self.values.shape[0]


def _block_size(n: int) -> int:
    # keep transient row blocks around 64 MB
    return max(1, min(n, 8_000_000 // max(n, 1)))


def knn_radii(dist, k: int) -> np.ndarray:
    """k-NN radius of every item from a distance source (self excluded)."""
    n = dist.n
    if not (1 <= k <= n - 1):
        raise InvalidInputError(f"k={k} out of range [1, {n - 1}]")
    radii = np.empty(n)
    step = _block_size(n)
    for start in range(0, n, step):
        stop = min(start + step, n)
        rows = dist.row_block(start, stop)
        # the self distance 0 occupies one slot, so the k-th other item
        # sits at partition index k
        radii[start:stop] = np.partition(rows, k, axis=1)[:, k]
    return radii


def knn_radius(data, i: int, k: int) -> float:
    """Distance from item ``i`` to its k-th nearest other item.

    Ties in distance leave the radius unchanged; neighbor identities are
    resolved by ascending item index wherever they matter.
    """
    if isinstance(data, (PointCloud, FiberSet)):
        dist = pairwise_distances(data)
    else:
        dist = data
    n = dist.n
    if not (0 <= i < n):
        raise InvalidInputError(f"item index {i} out of range")
    if not (1 <= k <= n - 1):
        raise InvalidInputError(f"k={k} out of range [1, {n - 1}]")
    row = dist.row_block(i, i + 1)[0]
    return float(np.partition(row, k)[k])


def _apply_duplicate_rule(values: np.ndarray) -> np.ndarray:
    infinite = ~np.isfinite(values)
    if not infinite.any():
        return values
    finite = values[~infinite]
    if finite.size == 0:
        raise InvalidInputError(
            "all items are duplicates of each other; density is undefined"
        )
    values = values.copy()
    values[infinite] = finite.max() * DUPLICATE_BUMP
    return values


def density_from_radii(radii: np.ndarray, n: int, dim: int, k: int,
                       kind: str = "density") -> DensityEstimate:
    """Turn k-NN radii into a DensityEstimate (shared by both pipelines)."""
    radii = np.asarray(radii, dtype=np.float64)
    with np.errstate(divide="ignore"):
        if kind == "density":
            values = k / (n * unit_ball_volume(dim) * radii ** dim)
        else:
            values = k / (n * radii)
    values = _apply_duplicate_rule(values)
    return DensityEstimate(values=values, k=k, kind=kind)


def knn_density(points: PointCloud, k: int, *, dist=None) -> DensityEstimate:
    """k-NN density estimate at every point of a cloud.

    Duplicate points (zero k-NN radius) are assigned the maximum finite
    density in the sample times ``DUPLICATE_BUMP`` rather than infinity.
    """
    if not isinstance(points, PointCloud):
        raise InvalidInputError("knn_density expects a PointCloud")
    if points.n < 2:
        raise InvalidInputError("need at least 2 points")
    if dist is None:
        dist = pairwise_distances(points)
    radii = knn_radii(dist, k)
    return density_from_radii(radii, points.n, points.dim, k, kind="density")


def pseudo_density(fibers: FiberSet, k: int, cutoff: float = 0.0, *,
                   dist=None) -> DensityEstimate:
    """Pseudo-density of every fiber, built on the fiber distance."""
    if not isinstance(fibers, FiberSet):
        raise InvalidInputError("pseudo_density expects a FiberSet")
    if fibers.n < 2:
        raise InvalidInputError("need at least 2 fibers")
    if dist is None:
        dist = pairwise_distances(fibers, cutoff=cutoff)
    radii = knn_radii(dist, k)
    return density_from_radii(radii, fibers.n, 1, k, kind="pseudo-density")
