import numpy as np
import pytest

from leveltree.errors import InvalidInputError
from leveltree.metrics import PointCloud
from leveltree.pipeline import build_tree_for_points
from leveltree.stability import (
    SUBSAMPLE_PROFILES,
    StabilityReport,
    mode_function,
    split_mass_histogram,
    subsample_trees,
)
from leveltree.tree import serialize
from tests.test_tree import load_fixture_tree


def two_cluster_points(rng, n=400, gap=10.0, sd=2.0):
    half = n // 2
    return PointCloud(np.concatenate([
        rng.normal(scale=sd, size=(half, 1)),
        rng.normal(scale=sd, size=(n - half, 1)) + gap,
    ]))


class TestModeFunction:
    def test_fixture_values(self):
        tree = load_fixture_tree()
        counts = mode_function(tree, [0.0, 0.30, 0.60])
        assert list(counts) == [1, 2, 3]

    def test_mass_zero_counts_roots(self, rng):
        data = two_cluster_points(rng)
        tree = build_tree_for_points(data, 60, 0.05)
        assert mode_function(tree, [0.0])[0] == len(tree.roots())

    def test_piecewise_constant_with_steps_at_boundaries(self, rng):
        data = two_cluster_points(rng)
        tree = build_tree_for_points(data, 60, 0.05)
        boundaries = sorted(
            {node.start_mass for node in tree.nodes.values()}
            | {node.end_mass for node in tree.nodes.values()}
        )
        grid = np.linspace(0, 1, 2001)
        counts = mode_function(tree, grid)
        changes = np.nonzero(np.diff(counts))[0]
        for idx in changes:
            # spans are left-open, so a boundary at b changes the count
            # strictly above b
            lo, hi = grid[idx], grid[idx + 1]
            assert any(lo <= b < hi for b in boundaries)
        assert counts[0] == len(tree.roots())

    def test_grid_validation(self):
        tree = load_fixture_tree()
        with pytest.raises(InvalidInputError):
            mode_function(tree, [0.5, 1.2])


class TestSubsampleTrees:
    def test_full_size_subsample_reproduces_full_tree(self, rng):
        data = two_cluster_points(rng, n=200)
        full = build_tree_for_points(data, 35, 0.05)
        report = subsample_trees(data, m=200, b=1, k=35, gamma=0.05, seed=0,
                                 keep_trees=True)
        assert serialize(report.full_trees[0]) == serialize(full)

    def test_deterministic_in_seed(self, rng):
        data = two_cluster_points(rng, n=300)
        a = subsample_trees(data, 150, 4, 25, 0.05, seed=9)
        b = subsample_trees(data, 150, 4, 25, 0.05, seed=9)
        assert a.to_document() == b.to_document()

    def test_split_masses_are_sorted_per_subsample(self, rng):
        data = two_cluster_points(rng, n=300)
        report = subsample_trees(data, 200, 5, 25, 0.05, seed=3)
        for masses in report.split_masses:
            assert masses == sorted(masses)

    def test_subsample_too_large(self, rng):
        data = two_cluster_points(rng, n=100)
        with pytest.raises(InvalidInputError):
            subsample_trees(data, 101, 1, 5, 0.0, seed=0)

    def test_profiles_recorded(self):
        assert SUBSAMPLE_PROFILES["large"] == {"size": 15_000, "count": 28}
        assert SUBSAMPLE_PROFILES["small"] == {"size": 1_500, "count": 23}


class TestSplitMassHistogram:
    def make_report(self, split_masses):
        return StabilityReport(
            subsample_size=10, subsample_count=len(split_masses), k=5,
            gamma=0.1, seed=0, split_masses=split_masses,
            mass_grid=np.linspace(0, 1, 4), mode_counts=[],
        )

    def test_identical_single_splits_pool_into_one_bin(self):
        report = self.make_report([[0.4], [0.4], [0.4]])
        hists = split_mass_histogram(report, bins=5)
        assert len(hists) == 1
        assert hists[0]["coverage"] == 1.0
        assert hists[0]["counts"].sum() == 3
        assert (hists[0]["counts"] > 0).sum() == 1

    def test_rank_pooling_trace(self):
        report = self.make_report([[0.40], [0.44], [0.42]])
        hists = split_mass_histogram(report, bins=4)
        assert len(hists) == 1
        assert sorted(hists[0]["values"]) == [0.40, 0.42, 0.44]

    def test_uneven_split_counts_report_coverage(self):
        report = self.make_report([[0.3, 0.6], [0.35], [0.32, 0.7], [0.31]])
        hists = split_mass_histogram(report, bins=3)
        assert len(hists) == 2
        assert hists[0]["coverage"] == 1.0
        assert hists[1]["coverage"] == 0.5
        assert sorted(hists[1]["values"]) == [0.6, 0.7]

    def test_rank_values_are_ordered_within_subsamples(self, rng):
        data = two_cluster_points(rng, n=300, sd=2.5)
        report = subsample_trees(data, 240, 4, 20, 0.03, seed=5)
        for masses in report.split_masses:
            for lo, hi in zip(masses, masses[1:]):
                assert lo <= hi

    def test_needs_two_subsamples(self):
        report = self.make_report([[0.4]])
        with pytest.raises(InvalidInputError):
            split_mass_histogram(report)


class TestReportDocument:
    def test_document_shape(self, rng):
        data = two_cluster_points(rng, n=200)
        report = subsample_trees(data, 150, 3, 25, 0.05, seed=1,
                                 mass_grid_size=64)
        doc = report.to_document()
        assert doc["format_version"] == 1
        assert doc["subsample_count"] == 3
        assert len(doc["trees"]) == 3
        assert len(doc["mode_function"]["grid"]) == 64
        assert len(doc["mode_function"]["counts"]) == 3
        for tree_nodes in doc["trees"]:
            for node in tree_nodes:
                assert {"id", "start_level", "end_level", "start_mass",
                        "end_mass", "size", "parent", "children"} <= set(node)

    def test_mode_csv(self, rng, tmp_path):
        data = two_cluster_points(rng, n=200)
        report = subsample_trees(data, 150, 2, 25, 0.05, seed=1,
                                 mass_grid_size=8)
        path = tmp_path / "modes.csv"
        with open(path, "w") as handle:
            report.write_mode_csv(handle)
        lines = path.read_text().splitlines()
        assert lines[1] == "mass,subsample_id,count"
        assert len(lines) == 2 + 2 * 8


def test_bootstrap_mode_samples_with_replacement(rng):
    # behind a flag: resampling with replacement duplicates some items
    data = two_cluster_points(rng, n=120)
    report = subsample_trees(data, 120, 1, 20, 0.05, seed=11, bootstrap=True)
    sizes = [node["size"] for node in report.trees[0] if node["parent"] is None]
    assert sum(sizes) == 120  # duplicates enter the tree as tied-density items
