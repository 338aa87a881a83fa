import json

import numpy as np
import pytest
from click.testing import CliRunner

from leveltree import formats
from leveltree.cli import main
from leveltree.metrics import PointCloud


@pytest.fixture
def runner():
    return CliRunner()


@pytest.fixture
def points_csv(tmp_path, rng):
    pts = np.concatenate([
        rng.normal(scale=2.0, size=(100, 1)),
        rng.normal(scale=2.0, size=(100, 1)) + 10.0,
    ])
    path = tmp_path / "points.csv"
    formats.write_points(PointCloud(pts), path)
    return path


def test_build_then_cluster_pipeline(runner, tmp_path, points_csv):
    tree_path = tmp_path / "tree.json"
    result = runner.invoke(main, [
        "build", "--input", str(points_csv), "--kind", "points",
        "--k", "35", "--gamma", "0.05", "--output", str(tree_path),
    ])
    assert result.exit_code == 0, result.output + str(result.exception)
    tree = formats.read_tree(tree_path)
    assert len(tree.leaves()) == 2

    labels_path = tmp_path / "labels.json"
    result = runner.invoke(main, [
        "cluster", "--tree", str(tree_path), "--method", "first-k",
        "--k-clusters", "2", "--assign-background",
        "--input", str(points_csv), "--output", str(labels_path),
    ])
    assert result.exit_code == 0, result.output + str(result.exception)
    labeling = formats.read_labeling(labels_path)
    assert labeling.background().size == 0
    assert len(set(labeling.labels)) == 2


def test_build_writes_to_stdout_and_logs_to_stderr(runner, points_csv):
    result = runner.invoke(main, [
        "build", "--input", str(points_csv), "--k", "10",
    ])
    assert result.exit_code == 0
    doc = json.loads(result.stdout)
    assert doc["format_version"] == 1
    assert "building tree" in result.stderr


def test_cluster_unachievable_k_exits_3(runner, tmp_path, points_csv):
    tree_path = tmp_path / "tree.json"
    runner.invoke(main, [
        "build", "--input", str(points_csv), "--k", "35",
        "--gamma", "0.05", "--output", str(tree_path),
    ])
    result = runner.invoke(main, [
        "cluster", "--tree", str(tree_path), "--method", "first-k",
        "--k-clusters", "50",
    ])
    assert result.exit_code == 3


def test_bad_input_exits_2(runner, tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text("1.0,2.0\n3.0\n")
    result = runner.invoke(main, [
        "build", "--input", str(bad), "--k", "5",
    ])
    assert result.exit_code == 2


def test_cut_method_requires_level(runner, tmp_path, points_csv):
    tree_path = tmp_path / "tree.json"
    runner.invoke(main, [
        "build", "--input", str(points_csv), "--k", "10",
        "--output", str(tree_path),
    ])
    result = runner.invoke(main, [
        "cluster", "--tree", str(tree_path), "--method", "cut",
    ])
    assert result.exit_code == 2


def test_simulate_deterministic(runner, tmp_path):
    args = ["simulate", "--scenario", "six-gaussians", "--n", "300",
            "--r", "0.9", "--seed", "7"]
    a = runner.invoke(main, args)
    b = runner.invoke(main, args)
    assert a.exit_code == 0
    assert a.stdout == b.stdout
    lines = [l for l in a.stdout.splitlines() if not l.startswith("#")]
    assert len(lines) == 300
    assert len(lines[0].split(",")) == 3


def test_simulate_truth_output(runner, tmp_path):
    truth_path = tmp_path / "truth.csv"
    points_path = tmp_path / "sim.csv"
    result = runner.invoke(main, [
        "simulate", "--scenario", "arcs-and-gaussians", "--n", "120",
        "--r", "1.0", "--seed", "3", "--output", str(points_path),
        "--truth-output", str(truth_path),
    ])
    assert result.exit_code == 0
    labels = [int(l) for l in truth_path.read_text().splitlines()[1:]]
    assert len(labels) == 120
    assert set(labels) <= set(range(1, 7))
    assert formats.read_points(points_path).n == 120


def test_stability_command(runner, tmp_path, points_csv):
    out = tmp_path / "stability.json"
    csv_out = tmp_path / "modes.csv"
    result = runner.invoke(main, [
        "stability", "--input", str(points_csv), "--k", "35",
        "--gamma", "0.05", "--subsamples", "3", "--size", "150",
        "--seed", "1", "--output", str(out), "--mode-csv", str(csv_out),
    ])
    assert result.exit_code == 0, result.output + str(result.exception)
    doc = json.loads(out.read_text())
    assert doc["subsample_count"] == 3
    assert len(doc["trees"]) == 3
    header = csv_out.read_text().splitlines()[1]
    assert header == "mass,subsample_id,count"


def test_benchmark_tiny_grid(runner, tmp_path):
    config = {
        "scenarios": ["six-gaussians"],
        "r_grid": [1.2],
        "n": 240,
        "replicates": 2,
        "methods": ["kmeans", "ward"],
        "master_seed": 11,
    }
    config_path = tmp_path / "config.json"
    config_path.write_text(json.dumps(config))
    out = tmp_path / "report.csv"
    result = runner.invoke(main, [
        "benchmark", "--config", str(config_path), "--output", str(out),
    ])
    assert result.exit_code == 0, result.output + str(result.exception)
    lines = out.read_text().splitlines()
    assert lines[1] == "scenario,r,method,mean_error,sd_error,replicates"
    assert len(lines) == 4  # comment + header + 2 method rows
