"""Subsampling reliability harness for level set trees.

Repeated tree builds on random subsamples show how stable the tree's
structure is: the mass levels at which splits occur are pooled by rank
across subsamples, and mode functions (live node count per mass level) are
overlaid. Subsampling is without replacement; a bootstrap mode (with
replacement) is available behind a flag for future inference work.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidInputError
from .metrics import FiberSet, PointCloud
from .pipeline import build_tree_for
from .tree import LevelSetTree

#: Subsample profiles used for the two production fiber datasets.
SUBSAMPLE_PROFILES = {
    "large": {"size": 15_000, "count": 28},
    "small": {"size": 1_500, "count": 23},
}

DEFAULT_MASS_GRID_SIZE = 512


@dataclass
class StabilityReport:
    """Per-subsample trees, split masses and mode functions."""

    subsample_size: int
    subsample_count: int
    k: int
    gamma: float
    seed: object
    trees: list = field(default_factory=list)
    split_masses: list = field(default_factory=list)
    mass_grid: np.ndarray = None
    mode_counts: list = field(default_factory=list)
    full_trees: list = field(default_factory=list)

    def to_document(self) -> dict:
        return {
            "format_version": 1,
            "subsample_size": self.subsample_size,
            "subsample_count": self.subsample_count,
            "k": self.k,
            "gamma": self.gamma,
            "trees": [
                [
                    {
                        "id": node["id"],
                        "start_level": node["start_level"],
                        "end_level": node["end_level"],
                        "start_mass": node["start_mass"],
                        "end_mass": node["end_mass"],
                        "size": node["size"],
                        "parent": node["parent"],
                        "children": node["children"],
                    }
                    for node in tree
                ]
                for tree in self.trees
            ],
            "split_masses": [[float(m) for m in masses] for masses in self.split_masses],
            "mode_function": {
                "grid": [float(g) for g in self.mass_grid],
                "counts": [[int(c) for c in counts] for counts in self.mode_counts],
            },
        }

    def write_mode_csv(self, handle) -> None:
        handle.write("# leveltree mode functions format_version=1\n")
        handle.write("mass,subsample_id,count\n")
        for b, counts in enumerate(self.mode_counts):
            for mass, count in zip(self.mass_grid, counts):
                handle.write(f"{float(mass)!r},{b},{int(count)}\n")


def mode_function(tree: LevelSetTree, mass_grid) -> np.ndarray:
    """Number of tree nodes whose mass span contains each grid value.

    Spans are half-open on the left (a node is live just above the mass at
    which it was born); roots additionally cover mass 0.
    """
    grid = np.asarray(mass_grid, dtype=np.float64)
    if grid.ndim != 1:
        raise InvalidInputError("mass grid must be 1-D")
    if np.any(grid < 0) or np.any(grid > 1):
        raise InvalidInputError("mass grid values must lie in [0, 1]")
    counts = np.zeros(grid.shape[0], dtype=np.int64)
    for node in tree.nodes.values():
        inside = (grid > node.start_mass) & (grid <= node.end_mass)
        if node.parent is None:
            inside |= grid == 0.0
        counts += inside
    return counts


def subsample_trees(data, m: int, b: int, k: int, gamma: float, seed, *,
                    cutoff: float = 0.0, bootstrap: bool = False,
                    mass_grid_size: int = DEFAULT_MASS_GRID_SIZE,
                    keep_trees: bool = False) -> StabilityReport:
    """Build trees on ``b`` random subsamples of size ``m``.

    Each subsample runs the full pipeline (density, graph, tree, prune).
    Deterministic in ``seed``; subsample indices are kept sorted so that
    ``m == n`` reproduces the full-data tree exactly.
    """
    if not isinstance(data, (PointCloud, FiberSet)):
        raise InvalidInputError("data must be a PointCloud or FiberSet")
    n = data.n
    if m > n:
        raise InvalidInputError(f"subsample size {m} exceeds data size {n}")
    if m < 2:
        raise InvalidInputError("subsample size must be at least 2")
    if b < 1:
        raise InvalidInputError("need at least one subsample")

    grid = np.linspace(0.0, 1.0, mass_grid_size)
    report = StabilityReport(subsample_size=m, subsample_count=b,
                             k=k, gamma=gamma, seed=seed, mass_grid=grid)
    for sub in range(b):
        rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(sub,)))
        idx = np.sort(rng.choice(n, size=m, replace=bootstrap))
        if isinstance(data, PointCloud):
            subset = PointCloud(data.points[idx])
        else:
            subset = FiberSet([data.fibers[i] for i in idx])
        tree = build_tree_for(subset, k, gamma, cutoff=cutoff)
        report.trees.append([
            {
                "id": nid,
                "start_level": node.start_level,
                "end_level": node.end_level,
                "start_mass": node.start_mass,
                "end_mass": node.end_mass,
                "size": node.size,
                "parent": node.parent,
                "children": list(node.children),
            }
            for nid, node in tree.nodes.items()
        ])
        report.split_masses.append([float(v) for v in tree.split_masses()])
        report.mode_counts.append(mode_function(tree, grid))
        if keep_trees:
            report.full_trees.append(tree)
    return report


def split_mass_histogram(report: StabilityReport, bins: int = 10) -> list:
    """Pool the rank-j split masses across subsamples into histogram j.

    Subsamples with fewer splits than a given rank simply do not contribute
    to it; each histogram records the fraction of subsamples covered.
    """
    if report.subsample_count < 2:
        raise InvalidInputError("need at least two subsamples to pool splits")
    max_rank = max((len(m) for m in report.split_masses), default=0)
    out = []
    for rank in range(max_rank):
        values = np.array(
            [masses[rank] for masses in report.split_masses if len(masses) > rank]
        )
        counts, edges = np.histogram(values, bins=bins)
        out.append(
            {
                "rank": rank,
                "coverage": values.size / report.subsample_count,
                "values": values,
                "bin_edges": edges,
                "counts": counts,
            }
        )
    return out
