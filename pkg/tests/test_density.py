import math

import numpy as np
import pytest

from leveltree.density import (
    DUPLICATE_BUMP,
    DensityEstimate,
    knn_density,
    knn_radius,
    pseudo_density,
    unit_ball_volume,
)
from leveltree.errors import InvalidInputError
from leveltree.metrics import FiberSet, PointCloud, pairwise_distances
from tests.reference import brute_knn_density, brute_knn_radii, brute_pairwise_points


def cloud_1d(*values):
    return PointCloud(np.asarray(values, dtype=float).reshape(-1, 1))


class TestUnitBallVolume:
    def test_exact_low_dimensions(self):
        assert unit_ball_volume(1) == 2.0
        assert unit_ball_volume(2) == math.pi
        assert unit_ball_volume(3) == 4.0 * math.pi / 3.0

    def test_recurrence(self):
        assert unit_ball_volume(4) == pytest.approx(math.pi**2 / 2.0, rel=1e-15)
        assert unit_ball_volume(5) == pytest.approx(8.0 * math.pi**2 / 15.0, rel=1e-15)


class TestKnnRadius:
    def test_direct_evaluation(self):
        cloud = cloud_1d(0, 1, 2)
        assert knn_radius(cloud, 0, 2) == 2.0
        assert knn_radius(cloud, 1, 1) == 1.0

    def test_k_equal_n_minus_1_is_max_distance(self, rng):
        pts = rng.normal(size=(20, 2))
        cloud = PointCloud(pts)
        dist = brute_pairwise_points(pts)
        for i in (0, 7, 19):
            expected = np.delete(dist[i], i).max()
            assert knn_radius(cloud, i, 19) == pytest.approx(expected, rel=1e-12)

    def test_k_out_of_range(self):
        with pytest.raises(InvalidInputError):
            knn_radius(cloud_1d(0, 1, 2), 0, 3)
        with pytest.raises(InvalidInputError):
            knn_radius(cloud_1d(0, 1, 2), 0, 0)


class TestKnnDensity:
    def test_two_points(self):
        est = knn_density(cloud_1d(0, 1), k=1)
        assert np.array_equal(est.values, [0.25, 0.25])

    def test_three_points(self):
        est = knn_density(cloud_1d(0, 1, 2), k=2)
        assert est.values[0] == pytest.approx(1 / 6, rel=1e-12)
        assert est.values[1] == pytest.approx(1 / 3, rel=1e-12)
        assert est.values[2] == pytest.approx(1 / 6, rel=1e-12)

    def test_unit_square_corners(self):
        corners = PointCloud([[0, 0], [0, 1], [1, 0], [1, 1]])
        est = knn_density(corners, k=1)
        assert np.allclose(est.values, 1.0 / (4.0 * math.pi), rtol=1e-12)

    def test_matches_brute_force_exactly(self, rng):
        for n, d, k in [(50, 1, 5), (120, 2, 7), (300, 3, 15), (500, 2, 40)]:
            pts = rng.normal(size=(n, d))
            est = knn_density(PointCloud(pts), k=k)
            brute = brute_knn_density(
                brute_pairwise_points(pts), k, d, unit_ball_volume(d)
            )
            assert np.allclose(est.values, brute, rtol=1e-12)

    def test_monotone_link_between_radius_and_density(self, rng):
        pts = rng.normal(size=(80, 2))
        dist = pairwise_distances(PointCloud(pts))
        radii = brute_knn_radii(dist.values, 6)
        est = knn_density(PointCloud(pts), k=6)
        for i in range(80):
            for j in range(i + 1, 80):
                if radii[i] < radii[j]:
                    assert est.values[i] > est.values[j]
                elif radii[i] > radii[j]:
                    assert est.values[i] < est.values[j]

    def test_scale_law_exact_for_power_of_two(self, rng):
        for d in (1, 2, 3):
            pts = rng.normal(size=(60, d))
            base = knn_density(PointCloud(pts), k=5).values
            for s in (2.0, 0.5, 8.0):
                scaled = knn_density(PointCloud(pts * s), k=5).values
                assert np.array_equal(scaled, base * s**-d)

    def test_scale_law_near_exact_generally(self, rng):
        pts = rng.normal(size=(60, 3))
        base = knn_density(PointCloud(pts), k=5).values
        scaled = knn_density(PointCloud(pts * 1.7), k=5).values
        assert np.allclose(scaled, base * 1.7**-3, rtol=1e-12)

    def test_permutation_equivariance(self, rng):
        pts = rng.normal(size=(70, 2))
        perm = rng.permutation(70)
        base = knn_density(PointCloud(pts), k=9).values
        permuted = knn_density(PointCloud(pts[perm]), k=9).values
        assert np.array_equal(permuted, base[perm])

    def test_duplicates_get_bumped_max_density(self):
        est = knn_density(cloud_1d(0, 0, 1, 5), k=1)
        finite_max = est.values[2:].max()
        assert est.values[0] == finite_max * DUPLICATE_BUMP
        assert est.values[1] == est.values[0]
        assert np.all(np.isfinite(est.values))
        assert est.values[0] > est.values.max() * (1 - 1e-9)

    def test_all_duplicates_rejected(self):
        with pytest.raises(InvalidInputError):
            knn_density(cloud_1d(3, 3, 3), k=1)


class TestPseudoDensity:
    def make_three_fibers(self):
        # pairwise fiber distances are exactly {d(0,1)=1, d(0,2)=2, d(1,2)=2}
        f0 = [(0, 0, 0), (1, 0, 0)]
        f1 = [(0, 1, 0), (1, 1, 0)]
        z = math.sqrt(3.75)
        f2 = [(0, 0.5, z), (1, 0.5, z)]
        return FiberSet([f0, f1, f2])

    def test_direct_evaluation(self):
        fibers = self.make_three_fibers()
        dist = pairwise_distances(fibers)
        assert dist.values[0, 1] == 1.0
        assert dist.values[0, 2] == 2.0
        assert dist.values[1, 2] == 2.0
        est = pseudo_density(fibers, k=1)
        assert est.kind == "pseudo-density"
        assert np.array_equal(est.values, [1 / 3, 1 / 3, 1 / 6])

    def test_duplicate_fibers_flagged_as_max(self):
        fib = [(0, 0, 0), (1, 0, 0)]
        far = [(9, 9, 9), (10, 9, 9)]
        other = [(3, 0, 0), (4, 0, 0)]
        est = pseudo_density(FiberSet([fib, fib, far, other]), k=1)
        assert est.values[0] == est.values[1] == est.values.max()
        assert np.all(np.isfinite(est.values))

    def test_doubling_coordinates_halves_values(self, rng):
        fibers = [rng.normal(size=(5, 3)) + rng.normal(scale=4, size=3)
                  for _ in range(10)]
        base = pseudo_density(FiberSet(fibers), k=2).values
        doubled = pseudo_density(FiberSet([f * 2.0 for f in fibers]), k=2).values
        assert np.array_equal(doubled, base / 2.0)


class TestDensityEstimate:
    def test_invariants_enforced(self):
        with pytest.raises(InvalidInputError):
            DensityEstimate(values=np.array([1.0, -1.0]), k=1)
        with pytest.raises(InvalidInputError):
            DensityEstimate(values=np.array([1.0, np.inf]), k=1)
        with pytest.raises(InvalidInputError):
            DensityEstimate(values=np.array([1.0, 1.0]), k=2)
        with pytest.raises(InvalidInputError):
            DensityEstimate(values=np.array([1.0, 1.0]), k=1, kind="other")
