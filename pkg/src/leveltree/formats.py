"""File formats: point CSV, fiber JSON-lines, tree and labeling documents.

All readers reject non-finite numbers and report the offending line; all
writers emit full-precision values that round-trip exactly. CSV files are
versioned by a leading comment, JSON documents by a ``format_version``
field.
"""

import csv
import hashlib
import json
import math
from pathlib import Path

import numpy as np

from .errors import ParseError
from .labeling import ClusterLabeling
from .metrics import FiberSet, PointCloud
from .tree import FORMAT_VERSION, LevelSetTree

_CSV_HEADER_COMMENT = f"# leveltree points format_version={FORMAT_VERSION}"


def _parse_float(cell: str, line_no: int) -> float:
    try:
        value = float(cell)
    except ValueError:
        raise ParseError(f"not a number: {cell!r}", line=line_no) from None
    if not math.isfinite(value):
        raise ParseError(f"non-finite value {cell!r}", line=line_no)
    return value


def read_points(path) -> PointCloud:
    """Read a point cloud from CSV, one row per point.

    An optional non-numeric header row is skipped; comment lines starting
    with '#' are ignored; ragged rows are rejected with their line number.
    """
    rows = []
    width = None
    with open(path, newline="") as handle:
        reader = csv.reader(handle)
        for line_no, row in enumerate(reader, start=1):
            if not row or (row[0].lstrip().startswith("#")):
                continue
            cells = [c.strip() for c in row]
            if width is None and rows == []:
                # header sniff: skip a first row that is not fully numeric
                try:
                    [float(c) for c in cells]
                except ValueError:
                    continue
            if width is None:
                width = len(cells)
            elif len(cells) != width:
                raise ParseError(
                    f"ragged row: expected {width} columns, found {len(cells)}",
                    line=line_no,
                )
            rows.append([_parse_float(c, line_no) for c in cells])
    if not rows:
        raise ParseError(f"no data rows in {path}")
    return PointCloud(np.asarray(rows, dtype=np.float64))


def write_points(points: PointCloud, path) -> None:
    with open(path, "w", newline="") as handle:
        handle.write(_CSV_HEADER_COMMENT + "\n")
        writer = csv.writer(handle)
        for row in points.points:
            writer.writerow([repr(float(v)) for v in row])


def read_fibers(path) -> FiberSet:
    """Read fibers from JSON-lines: each line a JSON array of [x, y, z]."""
    fibers = []
    with open(path) as handle:
        for line_no, line in enumerate(handle, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            try:
                raw = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ParseError(f"invalid JSON: {exc.msg}", line=line_no) from None
            if not isinstance(raw, list) or len(raw) < 2:
                raise ParseError("fiber must be an array of at least 2 vertices",
                                 line=line_no)
            arr = []
            for vertex in raw:
                if (not isinstance(vertex, list)) or len(vertex) != 3:
                    raise ParseError("vertex must be an [x, y, z] triplet",
                                     line=line_no)
                arr.append([_parse_float(str(c), line_no) for c in vertex])
            fibers.append(np.asarray(arr, dtype=np.float64))
    if not fibers:
        raise ParseError(f"no fibers in {path}")
    return FiberSet(fibers)


def write_fibers(fibers: FiberSet, path) -> None:
    with open(path, "w") as handle:
        for fib in fibers.fibers:
            handle.write(json.dumps([[float(v) for v in vertex] for vertex in fib]))
            handle.write("\n")


def read_tree(path) -> LevelSetTree:
    with open(path) as handle:
        text = handle.read()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc.msg}", line=exc.lineno) from None
    return LevelSetTree.from_document(doc)


def write_tree(tree: LevelSetTree, path) -> None:
    with open(path, "w") as handle:
        json.dump(tree.to_document(), handle)
        handle.write("\n")


def read_labeling(path) -> ClusterLabeling:
    with open(path) as handle:
        try:
            doc = json.load(handle)
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid JSON: {exc.msg}", line=exc.lineno) from None
    return ClusterLabeling.from_document(doc)


def write_labeling(labeling: ClusterLabeling, path) -> None:
    with open(path, "w") as handle:
        json.dump(labeling.to_document(), handle)
        handle.write("\n")


def dataset_manifest(path, kind: str) -> dict:
    """Describe a dataset file: item counts, shape stats and a digest."""
    path = Path(path)
    digest = hashlib.sha256(path.read_bytes()).hexdigest()
    if kind == "points":
        data = read_points(path)
        stats = {"n": data.n, "dim": data.dim}
    elif kind == "fibers":
        data = read_fibers(path)
        lengths = [f.shape[0] for f in data.fibers]
        stats = {
            "n": data.n,
            "vertices_total": int(sum(lengths)),
            "vertices_min": int(min(lengths)),
            "vertices_max": int(max(lengths)),
        }
    else:
        raise ParseError(f"unknown dataset kind {kind!r}")
    return {"path": str(path), "kind": kind, "digest": digest, **stats}
