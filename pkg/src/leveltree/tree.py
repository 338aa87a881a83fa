"""Level set tree construction, pruning, indexing and queries.

The tree records the connected components of the upper level sets
``{i : f(i) >= lambda}`` of a per-item density estimate, compiled over all
distinct density values and ordered by inclusion. Construction processes
items by descending density with an incremental union-find, which yields
output identical to recomputing components at every level but in
near-linear total time.

Every level has two readings:

* the density value ``lambda`` itself, and
* its *mass*: the fraction of items whose density lies strictly below
  ``lambda`` (the background fraction). Roots sit at mass 0; the retained
  probability content at a level is ``1 - mass``.

Split and vanish events are recorded at the density value whose removal
causes them. A node is therefore "alive" on the half-open interval
``(start_level, end_level]`` (roots additionally cover level 0), which
makes the clusters at any level exactly the connected components of the
upper level set at that level.
"""

import json
import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .density import DensityEstimate
from .errors import InvalidInputError, NotFoundError, ParseError
from .graph import NeighborGraph

FORMAT_VERSION = 1


@dataclass
class TreeNode:
    """One connected component's lifetime within the hierarchy."""

    id: int
    start_level: float
    end_level: float
    start_mass: float
    end_mass: float
    members: np.ndarray  # sorted item indices present at the start level
    parent: int | None = None
    children: list = field(default_factory=list)

    @property
    def size(self) -> int:
        return int(self.members.shape[0])

    @property
    def is_leaf(self) -> bool:
        return not self.children

    def __eq__(self, other):
        if not isinstance(other, TreeNode):
            return NotImplemented
        return (
            self.id == other.id
            and self.start_level == other.start_level
            and self.end_level == other.end_level
            and self.start_mass == other.start_mass
            and self.end_mass == other.end_mass
            and self.parent == other.parent
            and list(self.children) == list(other.children)
            and np.array_equal(self.members, other.members)
        )


class LevelSetTree:
    """Hierarchy of high-density components over one dataset.

    Finished trees are immutable (pruning returns a new tree) and safe to
    query concurrently.
    """

    def __init__(self, nodes, n, k, gamma, density_values=None):
        self.nodes = dict(sorted(nodes.items()))
        self.n = int(n)
        self.k = int(k)
        self.gamma = float(gamma)
        if density_values is not None:
            density_values = np.asarray(density_values, dtype=np.float64)
        self.density_values = density_values
        self._sorted_density = (
            np.sort(density_values) if density_values is not None else None
        )

    # -- structure ---------------------------------------------------------

    def roots(self):
        return [nid for nid, node in self.nodes.items() if node.parent is None]

    def leaves(self):
        """Leaf node ids, largest first (size descending, then id)."""
        out = [nid for nid, node in self.nodes.items() if node.is_leaf]
        out.sort(key=lambda nid: (-self.nodes[nid].size, nid))
        return out

    def query_node(self, node_id: int) -> TreeNode:
        try:
            return self.nodes[node_id]
        except KeyError:
            raise NotFoundError(f"no node with id {node_id}") from None

    def members_at(self, node_id: int, level: float) -> np.ndarray:
        """Members of a node still present at density ``level``.

        ``level`` must lie within the node's span. Trees deserialized
        without density values return the full member list.
        """
        node = self.query_node(node_id)
        if not (node.start_level <= level <= node.end_level):
            raise InvalidInputError(
                f"level {level} outside node {node_id} span "
                f"[{node.start_level}, {node.end_level}]"
            )
        if self.density_values is None:
            return node.members.copy()
        keep = self.density_values[node.members] >= level
        return node.members[keep]

    # -- level/mass indexing -------------------------------------------------

    def mass_of_level(self, level: float):
        """Fraction of items with density strictly below ``level``."""
        if self.density_values is None:
            raise InvalidInputError("tree carries no density values")
        if np.ndim(level) == 0 and level < 0:
            raise InvalidInputError("level must be nonnegative")
        counts = np.searchsorted(self._sorted_density, level, side="left")
        result = counts / self.n
        return float(result) if np.ndim(level) == 0 else result

    def density_cut_threshold(self, mass: float) -> float:
        """Density value whose removal realizes a cut at ``mass``.

        The upper level set at the returned mass consists of the items with
        density strictly greater than this value; at mass 0 it is the whole
        sample (returns 0).
        """
        if self.density_values is None:
            raise InvalidInputError("tree carries no density values")
        if not (0.0 <= mass <= 1.0):
            raise InvalidInputError("mass must lie in [0, 1]")
        count = math.ceil(mass * self.n)
        if count == 0:
            return 0.0
        return float(self._sorted_density[count - 1])

    def split_masses(self) -> np.ndarray:
        """Mass levels of all splits (end mass of internal nodes), sorted."""
        masses = [node.end_mass for node in self.nodes.values() if node.children]
        return np.sort(np.asarray(masses, dtype=np.float64))

    # -- serialization -------------------------------------------------------

    def to_document(self) -> dict:
        """JSON-ready document; nodes sorted by id, members ascending."""
        nodes = []
        for nid in sorted(self.nodes):
            node = self.nodes[nid]
            nodes.append(
                {
                    "id": nid,
                    "start_level": float(node.start_level),
                    "end_level": float(node.end_level),
                    "start_mass": float(node.start_mass),
                    "end_mass": float(node.end_mass),
                    "size": node.size,
                    "parent": node.parent,
                    "children": [int(c) for c in node.children],
                    "members": [int(m) for m in node.members],
                }
            )
        density = None
        if self.density_values is not None:
            density = [float(v) for v in self.density_values]
        return {
            "format_version": FORMAT_VERSION,
            "n": self.n,
            "k": self.k,
            "gamma": self.gamma,
            "density_values": density,
            "nodes": nodes,
        }

    @classmethod
    def from_document(cls, doc) -> "LevelSetTree":
        if not isinstance(doc, dict):
            raise ParseError("tree document must be a JSON object")
        for key in ("n", "k", "gamma", "nodes"):
            if key not in doc:
                raise ParseError(f"missing required key {key!r}", location="$")
        if not isinstance(doc["nodes"], list):
            raise ParseError("'nodes' must be a list", location="nodes")
        nodes = {}
        for pos, raw in enumerate(doc["nodes"]):
            loc = f"nodes[{pos}]"
            if not isinstance(raw, dict):
                raise ParseError("node entry must be an object", location=loc)
            try:
                nid = int(raw["id"])
                members = np.asarray(raw["members"], dtype=np.int64)
                node = TreeNode(
                    id=nid,
                    start_level=float(raw["start_level"]),
                    end_level=float(raw["end_level"]),
                    start_mass=float(raw["start_mass"]),
                    end_mass=float(raw["end_mass"]),
                    members=members,
                    parent=None if raw["parent"] is None else int(raw["parent"]),
                    children=[int(c) for c in raw["children"]],
                )
            except (KeyError, TypeError, ValueError) as exc:
                raise ParseError(f"malformed node: {exc}", location=loc) from None
            if "size" in raw and int(raw["size"]) != node.size:
                raise ParseError("size does not match member count", location=loc)
            if nid in nodes:
                raise ParseError(f"duplicate node id {nid}", location=loc)
            nodes[nid] = node
        for nid, node in nodes.items():
            for c in node.children:
                if c not in nodes or nodes[c].parent != nid:
                    raise ParseError(
                        f"inconsistent parent/child link {nid} -> {c}",
                        location=f"nodes(id={nid})",
                    )
            if node.parent is not None and node.parent not in nodes:
                raise ParseError(
                    f"unknown parent {node.parent}", location=f"nodes(id={nid})"
                )
        density = doc.get("density_values")
        if density is not None:
            density = np.asarray(density, dtype=np.float64)
            if density.shape[0] != int(doc["n"]):
                raise ParseError("density_values length mismatch",
                                 location="density_values")
        try:
            return cls(nodes, n=int(doc["n"]), k=int(doc["k"]),
                       gamma=float(doc["gamma"]), density_values=density)
        except (TypeError, ValueError) as exc:
            raise ParseError(f"malformed header: {exc}", location="$") from None

    def __eq__(self, other):
        if not isinstance(other, LevelSetTree):
            return NotImplemented
        same_density = (
            (self.density_values is None and other.density_values is None)
            or (
                self.density_values is not None
                and other.density_values is not None
                and np.array_equal(self.density_values, other.density_values)
            )
        )
        return (
            self.n == other.n
            and self.k == other.k
            and self.gamma == other.gamma
            and same_density
            and self.nodes == other.nodes
        )


def serialize(tree: LevelSetTree) -> str:
    """Tree document as a JSON string with full-precision numbers."""
    return json.dumps(tree.to_document())


def deserialize(text: str) -> LevelSetTree:
    """Parse a tree document; raises ParseError with a location on errors."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc.msg}", line=exc.lineno) from None
    return LevelSetTree.from_document(doc)


def mass_of_level(tree: LevelSetTree, level: float) -> float:
    """Background fraction at a density threshold (see LevelSetTree)."""
    return tree.mass_of_level(level)


# ---------------------------------------------------------------------------
# Construction
# ---------------------------------------------------------------------------

class _Component:
    """Live component during the descending sweep."""

    __slots__ = ("top", "children", "points")

    def __init__(self, top, children, points):
        self.top = top  # level at which this component came into being
        self.children = children  # proto-node ids finalized when it formed
        self.points = points  # items gathered since then


def build_tree(density: DensityEstimate, graph: NeighborGraph,
               gamma: float = 0.0) -> LevelSetTree:
    """Build (and optionally prune) the level set tree.

    Parameters
    ----------
    density : DensityEstimate
        Per-item density values; items with tied values enter and leave the
        upper level sets together.
    graph : NeighborGraph
        Similarity graph over the same items.
    gamma : float
        Pruning fraction in [0, 1); components smaller than
        ``ceil(gamma * n)`` points are dissolved after construction.

    Returns
    -------
    LevelSetTree
        Node ids are assigned in birth order (breadth-first from the
        roots), contiguous from 0.
    """
    if density is None or graph is None:
        raise InvalidInputError("density and graph are required")
    values = density.values
    n = values.shape[0]
    if n == 0:
        raise InvalidInputError("empty input")
    if graph.n != n:
        raise InvalidInputError("density and graph cover different item counts")
    if not (0.0 <= gamma < 1.0):
        raise InvalidInputError("gamma must lie in [0, 1)")

    order = np.lexsort((np.arange(n), -values))  # density desc, index asc
    sorted_desc = values[order]
    change = np.nonzero(np.diff(sorted_desc))[0] + 1
    starts = np.concatenate([[0], change])
    ends = np.concatenate([change, [n]])

    indptr, indices = graph.csr()
    parent = np.arange(n, dtype=np.int64)
    csize = np.ones(n, dtype=np.int64)
    active = np.zeros(n, dtype=np.uint8)
    seen = np.zeros(n, dtype=np.uint8)
    touched = np.empty(n, dtype=np.int64)

    components: dict[int, _Component] = {}
    protos = []  # (start_level, end_level, children, direct_points, is_root)

    for b in range(starts.shape[0]):
        batch = order[starts[b]:ends[b]]
        level = float(sorted_desc[starts[b]])
        nt = _kernels.sweep_batch(batch, parent, csize, active, seen,
                                  indptr, indices, touched)
        merged: dict[int, list] = {}
        for t in range(nt):
            root = int(touched[t])
            new_root = _kernels.uf_find(parent, root)
            merged.setdefault(new_root, []).append(components.pop(root))
        gathered: dict[int, list] = {}
        for p in batch:
            new_root = _kernels.uf_find(parent, int(p))
            gathered.setdefault(new_root, []).append(int(p))
        for new_root in set(merged) | set(gathered):
            olds = merged.get(new_root, ())
            fresh = gathered.get(new_root, [])
            if len(olds) == 0:
                components[new_root] = _Component(level, [], fresh)
            elif len(olds) == 1:
                comp = olds[0]
                comp.points.extend(fresh)
                components[new_root] = comp
            else:
                child_ids = []
                for comp in olds:
                    child_ids.append(len(protos))
                    protos.append((level, comp.top, comp.children, comp.points, False))
                components[new_root] = _Component(level, child_ids, fresh)

    for comp in components.values():
        protos.append((0.0, comp.top, comp.children, comp.points, True))

    tree = _materialize(protos, density, n)
    if gamma > 0.0:
        tree = _relabel(prune(tree, gamma))
    else:
        tree.gamma = gamma
    return tree


def _materialize(protos, density: DensityEstimate, n: int) -> LevelSetTree:
    """Turn proto-nodes into a LevelSetTree with breadth-first ids."""
    count = len(protos)
    members = [None] * count
    parents = [None] * count
    for tid in range(count):  # children always precede their parent
        start, end, children, direct, is_root = protos[tid]
        parts = [np.asarray(direct, dtype=np.int64)]
        for c in children:
            parts.append(members[c])
            parents[c] = tid
        members[tid] = np.sort(np.concatenate(parts))

    sorted_density = np.sort(density.values)

    def mass(level):
        return float(np.searchsorted(sorted_density, level, side="left") / n)

    # breadth-first ids: roots first, children ordered by size then member
    def sort_key(tid):
        return (-members[tid].shape[0], int(members[tid][0]))

    root_ids = [tid for tid in range(count) if protos[tid][4]]
    root_ids.sort(key=sort_key)
    queue = list(root_ids)
    idmap = {}
    pos = 0
    while pos < len(queue):
        tid = queue[pos]
        idmap[tid] = pos
        pos += 1
        kids = sorted(protos[tid][2], key=sort_key)
        queue.extend(kids)

    nodes = {}
    for tid, nid in idmap.items():
        start, end, children, _, is_root = protos[tid]
        nodes[nid] = TreeNode(
            id=nid,
            start_level=start,
            end_level=end,
            start_mass=mass(start),
            end_mass=mass(end),
            members=members[tid],
            parent=None if parents[tid] is None else idmap[parents[tid]],
            children=sorted((idmap[c] for c in children)),
        )
    return LevelSetTree(nodes, n=n, k=density.k, gamma=0.0,
                        density_values=density.values)


def _relabel(tree: LevelSetTree) -> LevelSetTree:
    """Reassign contiguous breadth-first ids (after pruning)."""

    def sort_key(nid):
        node = tree.nodes[nid]
        return (-node.size, int(node.members[0]))

    queue = sorted(tree.roots(), key=sort_key)
    idmap = {}
    pos = 0
    while pos < len(queue):
        nid = queue[pos]
        idmap[nid] = pos
        pos += 1
        queue.extend(sorted(tree.nodes[nid].children, key=sort_key))

    nodes = {}
    for old, new in idmap.items():
        node = tree.nodes[old]
        nodes[new] = TreeNode(
            id=new,
            start_level=node.start_level,
            end_level=node.end_level,
            start_mass=node.start_mass,
            end_mass=node.end_mass,
            members=node.members,
            parent=None if node.parent is None else idmap[node.parent],
            children=sorted(idmap[c] for c in node.children),
        )
    return LevelSetTree(nodes, n=tree.n, k=tree.k, gamma=tree.gamma,
                        density_values=tree.density_values)


# ---------------------------------------------------------------------------
# Pruning
# ---------------------------------------------------------------------------

def prune(tree: LevelSetTree, gamma: float) -> LevelSetTree:
    """Dissolve components smaller than ``ceil(gamma * n)`` points.

    Works bottom-up: at each split, children below the threshold are
    dissolved (their members already belong to the parent); if fewer than
    two children survive, the split itself is dissolved and the survivor is
    spliced into the parent. Node ids are preserved, so pruning a tree
    again with the same gamma is a no-op. The input tree is not modified.
    """
    if not (0.0 <= gamma < 1.0):
        raise InvalidInputError("gamma must lie in [0, 1)")
    threshold = math.ceil(gamma * tree.n)
    nodes = {
        nid: TreeNode(
            id=node.id,
            start_level=node.start_level,
            end_level=node.end_level,
            start_mass=node.start_mass,
            end_mass=node.end_mass,
            members=node.members,
            parent=node.parent,
            children=list(node.children),
        )
        for nid, node in tree.nodes.items()
    }

    # children before parents: breadth-first order, processed in reverse
    topo = [nid for nid in nodes if nodes[nid].parent is None]
    pos = 0
    while pos < len(topo):
        topo.extend(nodes[topo[pos]].children)
        pos += 1

    for nid in reversed(topo):
        node = nodes[nid]
        if not node.children:
            continue
        survivors = [c for c in node.children if nodes[c].size >= threshold]
        dissolved = [c for c in node.children if nodes[c].size < threshold]
        # a dissolved child cannot itself have surviving children (they
        # would make it larger than the threshold), so it is a leaf here
        if len(survivors) >= 2:
            for c in dissolved:
                del nodes[c]
            node.children = survivors
        elif len(survivors) == 1:
            surv = nodes.pop(survivors[0])
            ends = [(nodes[c].end_level, nodes[c].end_mass) for c in dissolved]
            for c in dissolved:
                del nodes[c]
            node.children = surv.children
            for gc in surv.children:
                nodes[gc].parent = nid
            if surv.children:
                node.end_level = surv.end_level
                node.end_mass = surv.end_mass
            else:
                # the node becomes a leaf; it lives until its deepest member
                ends.append((surv.end_level, surv.end_mass))
                node.end_level = max(e[0] for e in ends)
                node.end_mass = max(e[1] for e in ends)
        else:
            ends = [(nodes[c].end_level, nodes[c].end_mass) for c in dissolved]
            for c in dissolved:
                del nodes[c]
            node.children = []
            node.end_level = max(e[0] for e in ends)
            node.end_mass = max(e[1] for e in ends)

    return LevelSetTree(nodes, n=tree.n, k=tree.k, gamma=gamma,
                        density_values=tree.density_values)
