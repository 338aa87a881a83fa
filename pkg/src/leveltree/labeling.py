"""Cluster label extraction from a level set tree.

Three extraction methods are provided: cutting the tree at a single
density or mass level, taking every leaf as a cluster, and expanding from
the roots until a requested number of disjoint nodes appears. Items not
covered by a cluster form the background and can optionally be assigned to
the nearest foreground cluster afterwards.
"""

from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .errors import InvalidInputError, ParseError, UnachievableKError
from .metrics import FiberSet, PointCloud
from .tree import FORMAT_VERSION, LevelSetTree

LABELING_FORMAT_VERSION = FORMAT_VERSION


@dataclass
class ClusterLabeling:
    """Per-item cluster ids (tree node ids) with method provenance.

    ``labels[i]`` is None for background items. Foreground and background
    partition the full item range.
    """

    labels: list
    method: str
    params: dict = field(default_factory=dict)

    @property
    def n(self) -> int:
        return len(self.labels)

    def foreground(self) -> np.ndarray:
        return np.array([i for i, l in enumerate(self.labels) if l is not None],
                        dtype=np.int64)

    def background(self) -> np.ndarray:
        return np.array([i for i, l in enumerate(self.labels) if l is None],
                        dtype=np.int64)

    def cluster_ids(self) -> list:
        return sorted({l for l in self.labels if l is not None})

    def to_document(self) -> dict:
        return {
            "format_version": LABELING_FORMAT_VERSION,
            "method": self.method,
            "params": self.params,
            "labels": [None if l is None else int(l) for l in self.labels],
        }

    @classmethod
    def from_document(cls, doc) -> "ClusterLabeling":
        if not isinstance(doc, dict):
            raise ParseError("labeling document must be a JSON object")
        for key in ("method", "labels"):
            if key not in doc:
                raise ParseError(f"missing required key {key!r}", location="$")
        labels = doc["labels"]
        if not isinstance(labels, list):
            raise ParseError("'labels' must be a list", location="labels")
        clean = []
        for pos, l in enumerate(labels):
            if l is None:
                clean.append(None)
            elif isinstance(l, int):
                clean.append(l)
            else:
                raise ParseError("label must be an integer or null",
                                 location=f"labels[{pos}]")
        return cls(labels=clean, method=str(doc["method"]),
                   params=dict(doc.get("params", {})))


def _empty_labels(n):
    return [None] * n


def cut_at(tree: LevelSetTree, level: float, scale: str = "mass") -> ClusterLabeling:
    """One cluster per tree node whose span contains ``level``.

    A node's cluster holds its members still present at the level; all
    other items are background. A level above the top of the tree yields an
    empty foreground. ``scale`` selects whether ``level`` is a density
    value or a mass (background fraction).
    """
    if scale not in ("mass", "density"):
        raise InvalidInputError(f"unknown scale {scale!r}")
    if level < 0:
        raise InvalidInputError("level must be nonnegative")
    if scale == "mass" and level > 1:
        raise InvalidInputError("mass level must lie in [0, 1]")

    have_density = tree.density_values is not None
    if scale == "density":
        def span(node):
            lo, hi = node.start_level, node.end_level
            return (node.parent is None and level == 0.0) or lo < level <= hi

        if have_density:
            keep_mask = tree.density_values >= level
    else:
        def span(node):
            lo, hi = node.start_mass, node.end_mass
            return (node.parent is None and level == 0.0) or lo < level <= hi

        if have_density:
            cut_value = tree.density_cut_threshold(level)
            keep_mask = tree.density_values > cut_value
            if level == 0.0:
                keep_mask = np.ones(tree.n, dtype=bool)

    labels = _empty_labels(tree.n)
    for nid, node in tree.nodes.items():
        if not span(node):
            continue
        members = node.members
        if have_density:
            members = members[keep_mask[members]]
        for i in members:
            labels[int(i)] = nid
    return ClusterLabeling(labels=labels, method="cut",
                           params={"level": float(level), "scale": scale})


def all_mode(tree: LevelSetTree) -> ClusterLabeling:
    """One cluster per leaf of the (pruned) tree."""
    labels = _empty_labels(tree.n)
    for nid in tree.leaves():
        for i in tree.nodes[nid].members:
            labels[int(i)] = nid
    return ClusterLabeling(labels=labels, method="leaf", params={})


def first_k(tree: LevelSetTree, k: int) -> ClusterLabeling:
    """The first K disjoint nodes to appear as the level rises from zero.

    Starting from the roots, the frontier node with the lowest split level
    is replaced by its children until exactly K nodes remain. There is no
    guarantee such a frontier exists (multi-way splits can jump past K, or
    the tree may run out of leaves); in that case UnachievableKError is
    raised.
    """
    if k < 1:
        raise InvalidInputError("K must be >= 1")
    frontier = list(tree.roots())
    while len(frontier) < k:
        candidates = [nid for nid in frontier if tree.nodes[nid].children]
        if not candidates:
            raise UnachievableKError(
                f"tree has no frontier of {k} disjoint nodes"
            )
        # earliest split first; ties broken by mass (size) then id
        candidates.sort(key=lambda nid: (tree.nodes[nid].end_level,
                                         -tree.nodes[nid].size, nid))
        nxt = candidates[0]
        frontier.remove(nxt)
        frontier.extend(tree.nodes[nxt].children)
    if len(frontier) != k:
        raise UnachievableKError(
            f"no frontier of exactly {k} disjoint nodes exists"
        )
    labels = _empty_labels(tree.n)
    for nid in frontier:
        for i in tree.nodes[nid].members:
            labels[int(i)] = nid
    return ClusterLabeling(labels=labels, method="first-k", params={"K": int(k)})


def assign_background(labeling: ClusterLabeling, data,
                      k_assign: int = 1, *, cutoff: float = 0.0) -> ClusterLabeling:
    """Assign every background item the majority label of its nearest
    foreground items.

    Ties in the majority vote go to the smallest cluster id; ties in
    distance are broken by ascending item index. Foreground labels are
    never changed.
    """
    if k_assign < 1:
        raise InvalidInputError("k_assign must be >= 1")
    fg = labeling.foreground()
    if fg.size == 0:
        raise InvalidInputError("cannot assign background with empty foreground")
    bg = labeling.background()
    labels = list(labeling.labels)
    if bg.size == 0:
        return ClusterLabeling(labels=labels, method=labeling.method,
                               params=dict(labeling.params))
    if isinstance(data, PointCloud):
        if data.n != labeling.n:
            raise InvalidInputError("data and labeling sizes differ")
        dists = _kernels.point_cross(data.points[bg], data.points[fg])
    elif isinstance(data, FiberSet):
        if data.n != labeling.n:
            raise InvalidInputError("data and labeling sizes differ")
        flat, offsets = data.flattened()
        bg_off = np.zeros(bg.size + 1, dtype=np.int64)
        bg_off[1:] = np.cumsum([offsets[i + 1] - offsets[i] for i in bg])
        bg_flat = np.concatenate([flat[offsets[i]:offsets[i + 1]] for i in bg])
        fg_off = np.zeros(fg.size + 1, dtype=np.int64)
        fg_off[1:] = np.cumsum([offsets[i + 1] - offsets[i] for i in fg])
        fg_flat = np.concatenate([flat[offsets[i]:offsets[i + 1]] for i in fg])
        dists = _kernels.fiber_cross(bg_flat, bg_off, fg_flat, fg_off, float(cutoff))
    else:
        raise InvalidInputError("data must be a PointCloud or FiberSet")

    kk = min(k_assign, fg.size)
    fg_labels = np.array([labels[int(i)] for i in fg], dtype=np.int64)
    for row, item in enumerate(bg):
        nearest = np.argsort(dists[row], kind="stable")[:kk]
        votes = fg_labels[nearest]
        ids, counts = np.unique(votes, return_counts=True)
        winner = ids[counts == counts.max()].min()
        labels[int(item)] = int(winner)

    params = dict(labeling.params)
    params["assign_background"] = {"k_assign": int(k_assign)}
    return ClusterLabeling(labels=labels, method=labeling.method, params=params)
