"""HTTP facade over one loaded dataset and its level set tree.

All endpoints are pure reads over immutable state, so repeated identical
requests return identical bodies; the only mutable element is a
read-through cache of labelings keyed by method and parameters. Member
lists longer than 100k entries are run-length encoded.
"""

import json
import threading

import numpy as np
from fastapi import FastAPI, HTTPException, Query
from fastapi.middleware.cors import CORSMiddleware
from pydantic import BaseModel

from .errors import InvalidInputError, NotFoundError, UnachievableKError
from .labeling import all_mode, cut_at, first_k
from .metrics import FiberSet, PointCloud
from .stability import mode_function
from .tree import LevelSetTree

RLE_THRESHOLD = 100_000


def encode_indices(indices) -> dict:
    """Index list, run-length encoded above RLE_THRESHOLD entries."""
    indices = np.asarray(indices, dtype=np.int64)
    if indices.size <= RLE_THRESHOLD:
        return {"encoding": "list", "count": int(indices.size),
                "indices": [int(i) for i in indices]}
    breaks = np.nonzero(np.diff(indices) != 1)[0]
    starts = np.concatenate([[0], breaks + 1])
    stops = np.concatenate([breaks, [indices.size - 1]])
    ranges = [[int(indices[a]), int(indices[b]) + 1] for a, b in zip(starts, stops)]
    return {"encoding": "ranges", "count": int(indices.size), "ranges": ranges}


class SessionState:
    """Immutable dataset + tree plus a labeling cache."""

    def __init__(self, tree: LevelSetTree, dataset=None):
        self.tree = tree
        self.dataset = dataset
        self._cache = {}
        self._lock = threading.Lock()

    def coordinates(self) -> np.ndarray:
        if isinstance(self.dataset, PointCloud):
            return self.dataset.points
        if isinstance(self.dataset, FiberSet):
            # scatter view of a fiber set: one endpoint per fiber
            return np.stack([fib[-1] for fib in self.dataset.fibers])
        raise InvalidInputError("no dataset loaded")

    def cached_labeling(self, method: str, params: dict):
        key = (method, json.dumps(params, sort_keys=True))
        with self._lock:
            hit = self._cache.get(key)
        if hit is not None:
            return hit
        doc = self._compute_labeling(method, params).to_document()
        with self._lock:
            self._cache.setdefault(key, doc)
            return self._cache[key]

    def _compute_labeling(self, method, params):
        if method == "cut":
            return cut_at(self.tree, float(params.get("level", 0.0)),
                          scale=params.get("scale", "mass"))
        if method == "leaf":
            return all_mode(self.tree)
        if method == "first-k":
            if "K" not in params:
                raise InvalidInputError("first-k requires a K parameter")
            return first_k(self.tree, int(params["K"]))
        raise InvalidInputError(f"unknown clustering method {method!r}")


class ClusterRequest(BaseModel):
    method: str
    params: dict = {}


def _error(status: int, code: str, message: str):
    return HTTPException(status_code=status,
                         detail={"code": code, "message": message})


def create_app(tree: LevelSetTree, dataset=None, static_dir=None) -> FastAPI:
    """Build the explorer app for one dataset/tree pair."""
    state = SessionState(tree, dataset)
    app = FastAPI(title="leveltree explorer")
    app.add_middleware(
        CORSMiddleware,
        allow_origin_regex=r"https?://(localhost|127\.0\.0\.1)(:\d+)?",
        allow_methods=["*"],
        allow_headers=["*"],
    )

    @app.get("/api/tree")
    def get_tree():
        return state.tree.to_document()

    @app.get("/api/points")
    def get_points(stride: int = Query(default=1, ge=1)):
        try:
            coords = state.coordinates()
        except InvalidInputError as exc:
            raise _error(422, "no-dataset", str(exc))
        idx = np.arange(0, coords.shape[0], stride)
        density = state.tree.density_values
        return {
            "n": int(coords.shape[0]),
            "stride": stride,
            "indices": [int(i) for i in idx],
            "coordinates": [[float(v) for v in coords[i]] for i in idx],
            "density": None if density is None else [float(density[i]) for i in idx],
        }

    @app.get("/api/node/{node_id}/members")
    def get_members(node_id: int, level: float | None = None,
                    mass: float | None = None):
        try:
            node = state.tree.query_node(node_id)
        except NotFoundError as exc:
            raise _error(404, "unknown-node", str(exc))
        try:
            if level is not None:
                members = state.tree.members_at(node_id, level)
            elif mass is not None:
                if not (node.start_mass <= mass <= node.end_mass):
                    raise InvalidInputError(
                        f"mass {mass} outside node span "
                        f"[{node.start_mass}, {node.end_mass}]"
                    )
                if state.tree.density_values is None:
                    members = node.members
                else:
                    cut_value = state.tree.density_cut_threshold(mass)
                    dens = state.tree.density_values[node.members]
                    members = node.members[dens > cut_value] if mass > 0 \
                        else node.members
            else:
                members = node.members
        except InvalidInputError as exc:
            raise _error(422, "invalid-level", str(exc))
        return {"node": node_id, **encode_indices(members)}

    @app.post("/api/cluster")
    def post_cluster(request: ClusterRequest):
        try:
            return state.cached_labeling(request.method, request.params)
        except UnachievableKError as exc:
            raise _error(422, "unachievable-k", str(exc))
        except InvalidInputError as exc:
            raise _error(422, "invalid-params", str(exc))

    @app.get("/api/modefunction")
    def get_mode_function(grid: int = Query(default=512, ge=2, le=100_000)):
        values = np.linspace(0.0, 1.0, grid)
        counts = mode_function(state.tree, values)
        return {"grid": [float(v) for v in values],
                "counts": [int(c) for c in counts]}

    if static_dir is not None:
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=str(static_dir), html=True),
                  name="explorer")

    return app
