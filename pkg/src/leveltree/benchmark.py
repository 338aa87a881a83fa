"""Clustering benchmark: scenario generators, baselines, matched error rates.

Three 3-D scenarios of increasing difficulty are generated, each a mixture
of six groups: spherical Gaussians; Gaussians plus noisy arcs; and a
surrogate for resampled fiber-endpoint data built from nonconvex shells
enclosing anisotropic blobs. Difficulty is controlled by contracting every
group center toward the grand mean by a coefficient r. Error rates are
misclassification fractions minimized over all matchings between predicted
cluster ids and true group ids.

The surrogate stands in for subject-derived endpoint data that cannot be
shipped; outputs label it as a surrogate.
"""

import itertools
import multiprocessing
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidInputError, UnachievableKError
from .labeling import all_mode, assign_background, first_k
from .metrics import PointCloud
from .pipeline import build_tree_for_points

SCENARIO_KINDS = ("six-gaussians", "arcs-and-gaussians", "endpoint-surrogate")
N_GROUPS = 6
_MAX_BRUTE_FORCE = 8


@dataclass
class Scenario:
    """One simulated dataset with ground-truth group labels (1..6)."""

    kind: str
    n: int
    r: float
    seed: object
    points: np.ndarray
    truth: np.ndarray


@dataclass
class ErrorReport:
    """Mean/sd classification error per (scenario, r, method) cell."""

    rows: list = field(default_factory=list)

    def add(self, scenario, r, method, errors):
        errors = np.asarray(errors, dtype=np.float64)
        sd = float(errors.std(ddof=1)) if errors.size > 1 else 0.0
        self.rows.append(
            {
                "scenario": scenario,
                "r": float(r),
                "method": method,
                "mean_error": float(errors.mean()),
                "sd_error": sd,
                "replicates": int(errors.size),
            }
        )

    def cell(self, scenario, r, method):
        for row in self.rows:
            if (row["scenario"] == scenario and row["method"] == method
                    and abs(row["r"] - r) < 1e-12):
                return row
        raise KeyError((scenario, r, method))

    def write_csv(self, handle) -> None:
        handle.write("# leveltree benchmark format_version=1\n")
        handle.write("scenario,r,method,mean_error,sd_error,replicates\n")
        for row in sorted(self.rows, key=lambda r: (r["scenario"], r["r"], r["method"])):
            handle.write(
                f"{row['scenario']},{row['r']!r},{row['method']},"
                f"{row['mean_error']!r},{row['sd_error']!r},{row['replicates']}\n"
            )


# ---------------------------------------------------------------------------
# Scenario generation
# ---------------------------------------------------------------------------

def _octahedron(radius):
    eye = np.eye(3)
    return np.concatenate([radius * eye, -radius * eye], axis=0)


def _rotation(axis, angle):
    axis = np.asarray(axis, dtype=np.float64)
    axis = axis / np.linalg.norm(axis)
    x, y, z = axis
    c, s = np.cos(angle), np.sin(angle)
    cc = 1 - c
    return np.array(
        [
            [c + x * x * cc, x * y * cc - z * s, x * z * cc + y * s],
            [y * x * cc + z * s, c + y * y * cc, y * z * cc - x * s],
            [z * x * cc - y * s, z * y * cc + x * s, c + z * z * cc],
        ]
    )


def _gaussian_group(rng, size, scale=1.0):
    return rng.normal(scale=scale, size=(size, 3))


def _arc_group(rng, size, radius=4.0, half_span=np.pi / 2, jitter=0.4, tilt=0):
    angles = rng.uniform(-half_span, half_span, size=size)
    pts = np.stack(
        [radius * np.cos(angles), radius * np.sin(angles), np.zeros(size)], axis=1
    )
    # recenter so the group mean sits at the origin
    centroid = np.array([radius * np.sin(half_span) / half_span, 0.0, 0.0])
    pts -= centroid
    pts = pts @ _rotation([1.0, 1.0, 0.0], tilt).T
    return pts + rng.normal(scale=jitter, size=(size, 3))


def _shell_group(rng, size, radius=8.0, jitter=0.3):
    direction = rng.normal(size=(size, 3))
    direction /= np.linalg.norm(direction, axis=1, keepdims=True)
    return radius * direction + rng.normal(scale=jitter, size=(size, 3))


def _blob_group(rng, size, scales=(1.2, 0.9, 0.6), tilt=0.5):
    # truncated at 3 sigma so blob tails never touch the enclosing shell
    pts = rng.normal(size=(size, 3))
    while True:
        bad = np.abs(pts).max(axis=1) > 3.0
        if not bad.any():
            break
        pts[bad] = rng.normal(size=(int(bad.sum()), 3))
    pts = pts * np.asarray(scales)
    return pts @ _rotation([0.0, 1.0, 1.0], tilt).T


def _group_samplers(kind):
    """Per-group (center, sampler) pairs; samplers produce zero-mean groups."""
    if kind == "six-gaussians":
        centers = _octahedron(5.0)
        return [(centers[g], _gaussian_group) for g in range(6)]
    if kind == "arcs-and-gaussians":
        centers = _octahedron(5.0)
        spec = []
        for g in range(3):
            spec.append((centers[g], _gaussian_group))
        for g in range(3):
            tilt = 0.7 * g

            def sampler(rng, size, _tilt=tilt):
                return _arc_group(rng, size, tilt=_tilt)

            spec.append((centers[3 + g], sampler))
        return spec
    if kind == "endpoint-surrogate":
        anchors = _octahedron(20.0)[:3]
        spec = []
        for g in range(3):
            spec.append((anchors[g], _shell_group))
        for g in range(3):
            tilt = 0.4 + 0.5 * g

            def sampler(rng, size, _tilt=tilt):
                return _blob_group(rng, size, tilt=_tilt)

            spec.append((anchors[g], sampler))
        return spec
    raise InvalidInputError(f"unknown scenario kind {kind!r}")


def generate(kind: str, n: int, r: float, seed) -> Scenario:
    """Draw one dataset; group centers contracted toward the grand mean by r."""
    spec = _group_samplers(kind)
    if n < N_GROUPS:
        raise InvalidInputError(f"n must be at least {N_GROUPS}")
    if r < 0:
        raise InvalidInputError("contraction coefficient r must be nonnegative")
    rng = np.random.default_rng(seed)
    centers = np.stack([c for c, _ in spec])
    grand = centers.mean(axis=0)
    contracted = grand + r * (centers - grand)

    counts = rng.multinomial(n, np.full(N_GROUPS, 1.0 / N_GROUPS))
    points = []
    truth = []
    for g, (count, (_, sampler)) in enumerate(zip(counts, spec)):
        points.append(contracted[g] + sampler(rng, count))
        truth.append(np.full(count, g + 1, dtype=np.int64))
    points = np.concatenate(points, axis=0)
    truth = np.concatenate(truth)
    perm = rng.permutation(n)
    return Scenario(kind=kind, n=n, r=float(r), seed=seed,
                    points=points[perm], truth=truth[perm])


# ---------------------------------------------------------------------------
# Error rate
# ---------------------------------------------------------------------------

def _confusion(predicted, truth):
    pred_ids = sorted({p for p in predicted if p is not None})
    true_ids = sorted(set(int(t) for t in truth))
    pindex = {p: i for i, p in enumerate(pred_ids)}
    tindex = {t: i for i, t in enumerate(true_ids)}
    matrix = np.zeros((len(pred_ids), len(true_ids)), dtype=np.int64)
    for p, t in zip(predicted, truth):
        if p is not None:
            matrix[pindex[p], tindex[int(t)]] += 1
    return matrix


def _best_match_brute(matrix):
    side = max(matrix.shape)
    padded = np.zeros((side, side), dtype=np.int64)
    padded[: matrix.shape[0], : matrix.shape[1]] = matrix
    best = 0
    for perm in itertools.permutations(range(side)):
        total = sum(padded[i, perm[i]] for i in range(side))
        if total > best:
            best = total
    return best


def error_rate(predicted, truth) -> float:
    """Minimum misclassification fraction over id matchings.

    Null predictions always count as errors. True group counts above 8 are
    unsupported (the matching is found by brute force over permutations).
    """
    predicted = list(predicted)
    truth = np.asarray(truth)
    if len(predicted) != truth.shape[0]:
        raise InvalidInputError("predicted and truth lengths differ")
    if truth.shape[0] == 0:
        raise InvalidInputError("empty labelings")
    n_true = len(set(int(t) for t in truth))
    if n_true > _MAX_BRUTE_FORCE:
        raise InvalidInputError(
            f"more than {_MAX_BRUTE_FORCE} true groups is unsupported"
        )
    matrix = _confusion(predicted, truth)
    if matrix.shape[0] == 0:
        return 1.0
    if max(matrix.shape) <= _MAX_BRUTE_FORCE:
        matched = _best_match_brute(matrix)
    else:
        from scipy.optimize import linear_sum_assignment

        rows, cols = linear_sum_assignment(matrix, maximize=True)
        matched = int(matrix[rows, cols].sum())
    return 1.0 - matched / truth.shape[0]


# ---------------------------------------------------------------------------
# Clusterers
# ---------------------------------------------------------------------------

def kmeans_pp(points, k: int, seed) -> list:
    """k-means with standard D^2 seeding."""
    from sklearn.cluster import KMeans

    points = np.asarray(points)
    if points.shape[0] < k:
        raise InvalidInputError("fewer points than clusters")
    state = int(np.random.default_rng(seed).integers(2**31 - 1))
    model = KMeans(n_clusters=k, init="k-means++", n_init=1, random_state=state)
    return [int(l) for l in model.fit_predict(points)]


def _linkage_labels(points, k, method, condensed=None):
    from scipy.cluster.hierarchy import fcluster, linkage

    points = np.asarray(points)
    if points.shape[0] < k:
        raise InvalidInputError("fewer points than clusters")
    if condensed is None:
        from scipy.spatial.distance import pdist

        condensed = pdist(points)
    tree = linkage(condensed, method=method)
    return [int(l) for l in fcluster(tree, t=k, criterion="maxclust")]


def single_linkage(points, k: int, *, condensed=None) -> list:
    """Agglomeration under the single linkage criterion, cut at k clusters."""
    return _linkage_labels(points, k, "single", condensed)


def ward_linkage(points, k: int, *, condensed=None) -> list:
    """Agglomeration under the Ward criterion, cut at k clusters."""
    return _linkage_labels(points, k, "ward", condensed)


def dbscan(points, *, eps_quantile: float = 0.02,
           core_quantile: float = 0.01, condensed=None) -> list:
    """DBSCAN with data-driven parameters (the cluster count is its own).

    eps is the ``eps_quantile`` quantile of all pairwise distances. The
    core-point threshold is the eps-neighbor count of the point at the
    ``core_quantile`` rank of the neighbor-count distribution; this reading
    of "first percentile" is a knob because the prescription conflates a
    count with a distance. Noise points are returned as None.
    """
    from scipy.spatial import cKDTree
    from sklearn.cluster import DBSCAN

    points = np.asarray(points)
    if points.shape[0] < 2:
        raise InvalidInputError("need at least 2 points")
    if condensed is None:
        from scipy.spatial.distance import pdist

        condensed = pdist(points)
    eps = float(np.quantile(condensed, eps_quantile))
    if eps <= 0:
        eps = np.finfo(np.float64).tiny
    counts = cKDTree(points).query_ball_point(points, r=eps, return_length=True)
    min_samples = max(1, int(np.quantile(counts, core_quantile)))
    raw = DBSCAN(eps=eps, min_samples=min_samples).fit_predict(points)
    return [None if l == -1 else int(l) for l in raw]


def level_set_labels(points, k_clusters: int, *, k: int = 100,
                     gamma: float = 0.05, k_assign: int = 1) -> list:
    """Level-set-tree clustering with fixed K plus background assignment.

    When the pruned tree cannot supply K disjoint nodes, all leaves are
    used instead (the closest attainable partition).
    """
    cloud = PointCloud(points)
    k_eff = min(k, cloud.n - 1)
    tree = build_tree_for_points(cloud, k_eff, gamma)
    try:
        labeling = first_k(tree, k_clusters)
    except UnachievableKError:
        labeling = all_mode(tree)
    labeling = assign_background(labeling, cloud, k_assign)
    return list(labeling.labels)


# ---------------------------------------------------------------------------
# Protocol driver
# ---------------------------------------------------------------------------

DEFAULT_CONFIG = {
    "scenarios": list(SCENARIO_KINDS),
    "r_grid": {"start": 0.1, "stop": 1.2, "count": 20},
    "n": 5000,
    "replicates": 20,
    "master_seed": 20130214,
    "methods": ["density", "kmeans", "ward", "s.link", "dbscan"],
    "lst_k": 40,
    "lst_gamma": 0.05,
    "lst_k_assign": 1,
    "dbscan_eps_quantile": 0.02,
    "dbscan_core_quantile": 0.01,
    "processes": 1,
}


def _r_values(grid):
    if isinstance(grid, dict):
        return [float(v) for v in np.linspace(grid["start"], grid["stop"],
                                              int(grid["count"]))]
    return [float(v) for v in grid]


def _cell_seed(master, kind_idx, r_idx, rep):
    return np.random.SeedSequence(master, spawn_key=(kind_idx, r_idx, rep))


def _init_worker():
    # one kernel thread per worker; the pool already saturates the cores
    from . import _kernels

    _kernels.set_threads(1)


def run_cell(args):
    """Errors of every method on one replicate dataset (one grid cell)."""
    config, kind_idx, kind, r_idx, r, rep = args
    seed = _cell_seed(config["master_seed"], kind_idx, r_idx, rep)
    scenario = generate(kind, config["n"], r, seed)
    method_seed = np.random.SeedSequence(
        config["master_seed"], spawn_key=(kind_idx, r_idx, rep, 1)
    )
    condensed = None
    if {"ward", "s.link", "dbscan"} & set(config["methods"]):
        from scipy.spatial.distance import pdist

        condensed = pdist(scenario.points)
    out = {}
    for method in config["methods"]:
        if method == "density":
            predicted = level_set_labels(
                scenario.points, N_GROUPS, k=config["lst_k"],
                gamma=config["lst_gamma"], k_assign=config["lst_k_assign"],
            )
        elif method == "kmeans":
            predicted = kmeans_pp(scenario.points, N_GROUPS, method_seed)
        elif method == "ward":
            predicted = ward_linkage(scenario.points, N_GROUPS,
                                     condensed=condensed)
        elif method == "s.link":
            predicted = single_linkage(scenario.points, N_GROUPS,
                                       condensed=condensed)
        elif method == "dbscan":
            predicted = dbscan(
                scenario.points,
                eps_quantile=config["dbscan_eps_quantile"],
                core_quantile=config["dbscan_core_quantile"],
                condensed=condensed,
            )
        else:
            raise InvalidInputError(f"unknown method {method!r}")
        out[method] = error_rate(predicted, scenario.truth)
    return (kind, r, rep, out)


def run_benchmark(config=None) -> ErrorReport:
    """Run the full (scenario x r x replicate x method) grid.

    Deterministic for a fixed master seed regardless of the process count:
    every cell derives its own seed from the master seed and its grid
    coordinates.
    """
    merged = dict(DEFAULT_CONFIG)
    if config:
        merged.update(config)
    for kind in merged["scenarios"]:
        if kind not in SCENARIO_KINDS:
            raise InvalidInputError(f"unknown scenario kind {kind!r}")
    r_values = _r_values(merged["r_grid"])
    replicates = int(merged["replicates"])

    tasks = [
        (merged, kind_idx, kind, r_idx, r, rep)
        for kind_idx, kind in enumerate(merged["scenarios"])
        for r_idx, r in enumerate(r_values)
        for rep in range(replicates)
    ]
    processes = int(merged.get("processes", 1))
    if processes > 1:
        # spawn: the jitted kernels' thread pool does not survive a fork
        context = multiprocessing.get_context("spawn")
        with ProcessPoolExecutor(max_workers=processes, mp_context=context,
                                 initializer=_init_worker) as pool:
            results = list(pool.map(run_cell, tasks, chunksize=1))
    else:
        results = [run_cell(task) for task in tasks]

    report = ErrorReport()
    for kind in merged["scenarios"]:
        for r in r_values:
            per_method = {m: [] for m in merged["methods"]}
            for res_kind, res_r, rep, errors in results:
                if res_kind == kind and res_r == r:
                    for m, e in errors.items():
                        per_method[m].append((rep, e))
            for method, pairs in per_method.items():
                pairs.sort()
                report.add(kind, r, method, [e for _, e in pairs])
    return report
