"""End-to-end tree construction: distances, density, graph, tree, prune."""

from .density import density_from_radii, knn_radii
from .errors import InvalidInputError
from .graph import knn_graph
from .metrics import DEFAULT_DENSE_CAP, FiberSet, PointCloud, pairwise_distances
from .tree import LevelSetTree, build_tree


def build_tree_for_points(points: PointCloud, k: int, gamma: float = 0.0, *,
                          dense_cap: int = DEFAULT_DENSE_CAP) -> LevelSetTree:
    """Full pipeline for a point cloud."""
    dist = pairwise_distances(points, dense_cap=dense_cap)
    radii = knn_radii(dist, k)
    density = density_from_radii(radii, points.n, points.dim, k, kind="density")
    graph = knn_graph(dist, k, radii=radii)
    return build_tree(density, graph, gamma)


def build_tree_for_fibers(fibers: FiberSet, k: int, gamma: float = 0.0, *,
                          cutoff: float = 0.0,
                          dense_cap: int = DEFAULT_DENSE_CAP) -> LevelSetTree:
    """Full pipeline for a fiber set (pseudo-density on fiber distances)."""
    dist = pairwise_distances(fibers, cutoff=cutoff, dense_cap=dense_cap)
    radii = knn_radii(dist, k)
    density = density_from_radii(radii, fibers.n, 1, k, kind="pseudo-density")
    graph = knn_graph(dist, k, radii=radii)
    return build_tree(density, graph, gamma)


def build_tree_for(data, k: int, gamma: float = 0.0, *, cutoff: float = 0.0,
                   dense_cap: int = DEFAULT_DENSE_CAP) -> LevelSetTree:
    """Dispatch on the dataset type."""
    if isinstance(data, PointCloud):
        return build_tree_for_points(data, k, gamma, dense_cap=dense_cap)
    if isinstance(data, FiberSet):
        return build_tree_for_fibers(data, k, gamma, cutoff=cutoff,
                                     dense_cap=dense_cap)
    raise InvalidInputError("data must be a PointCloud or FiberSet")
