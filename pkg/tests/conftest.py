import numpy as np
import pytest

from leveltree import _kernels
from leveltree.metrics import DistanceMatrix, PointCloud


@pytest.fixture(scope="session", autouse=True)
def warm_kernels():
    # pay jit compilation once, outside any timed test
    _kernels.warmup()


@pytest.fixture
def rng():
    return np.random.default_rng(20130214)


def two_blob_cloud(rng, n_per=100, gap=10.0, sd=1.0, dim=1):
    a = rng.normal(scale=sd, size=(n_per, dim))
    b = rng.normal(scale=sd, size=(n_per, dim))
    b[:, 0] += gap
    return PointCloud(np.concatenate([a, b]))


def distance_matrix_from_points(points):
    from tests.reference import brute_pairwise_points

    return DistanceMatrix(brute_pairwise_points(points))
