"""Density-based hierarchical clustering with level set trees.

The tree of connected components of density upper level sets gives a
multi-scale picture of a dataset's mode structure: build it from a k-NN
density estimate and similarity graph, prune away small components, cut or
traverse it for cluster labels, and measure its stability under
subsampling. Works on Euclidean point clouds and on 3-D polyline (fiber)
data through a pseudo-density.
"""

from ._kernels import backend as kernel_backend
from .density import DensityEstimate, knn_density, knn_radius, pseudo_density
from .errors import (
    InvalidInputError,
    LevelTreeError,
    NotFoundError,
    ParseError,
    UnachievableKError,
)
from .graph import ComponentLabeling, NeighborGraph, components, knn_graph
from .labeling import (
    ClusterLabeling,
    all_mode,
    assign_background,
    cut_at,
    first_k,
)
from .metrics import (
    DistanceMatrix,
    FiberSet,
    PointCloud,
    StreamingDistanceMatrix,
    euclidean,
    fiber_distance,
    pairwise_distances,
)
from .pipeline import build_tree_for, build_tree_for_fibers, build_tree_for_points
from .stability import mode_function, split_mass_histogram, subsample_trees
from .tree import (
    LevelSetTree,
    TreeNode,
    build_tree,
    deserialize,
    mass_of_level,
    prune,
    serialize,
)

__version__ = "0.1.0"

__all__ = [
    "ClusterLabeling",
    "ComponentLabeling",
    "DensityEstimate",
    "DistanceMatrix",
    "FiberSet",
    "InvalidInputError",
    "LevelSetTree",
    "LevelTreeError",
    "NeighborGraph",
    "NotFoundError",
    "ParseError",
    "PointCloud",
    "StreamingDistanceMatrix",
    "TreeNode",
    "UnachievableKError",
    "all_mode",
    "assign_background",
    "build_tree",
    "build_tree_for",
    "build_tree_for_fibers",
    "build_tree_for_points",
    "components",
    "cut_at",
    "deserialize",
    "euclidean",
    "fiber_distance",
    "first_k",
    "kernel_backend",
    "knn_density",
    "knn_graph",
    "knn_radius",
    "mass_of_level",
    "mode_function",
    "pairwise_distances",
    "prune",
    "pseudo_density",
    "serialize",
    "split_mass_histogram",
    "subsample_trees",
]
