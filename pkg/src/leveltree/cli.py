"""Command-line entry points tying the pipeline together.

Progress and parameters go to standard error; data goes to standard
output or the requested files, so subcommands compose in shell pipelines.
Exit codes: 0 success, 2 invalid input, 3 unachievable cluster count.
"""

import json
import logging
import sys

import click

from . import _kernels, formats, labeling as labeling_ops
from .benchmark import generate, run_benchmark
from .errors import InvalidInputError, LevelTreeError, UnachievableKError
from .metrics import DEFAULT_DENSE_CAP
from .pipeline import build_tree_for
from .stability import subsample_trees

log = logging.getLogger("leveltree")


def _setup_logging():
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter("%(levelname)s %(message)s"))
    log.addHandler(handler)
    log.setLevel(logging.INFO)


def _fail(exc: LevelTreeError):
    log.error(str(exc))
    sys.exit(3 if isinstance(exc, UnachievableKError) else 2)


def _read_dataset(path, kind):
    if kind == "points":
        return formats.read_points(path)
    return formats.read_fibers(path)


def _write_json(doc, output):
    text = json.dumps(doc)
    if output == "-":
        click.echo(text)
    else:
        with open(output, "w") as handle:
            handle.write(text + "\n")


@click.group()
@click.option("--threads", type=int, default=0,
              help="Worker thread cap for the numeric kernels (0 = default).")
def main(threads):
    """Level set tree construction, clustering and serving."""
    _setup_logging()
    if threads:
        _kernels.set_threads(threads)


@main.command()
@click.option("--input", "input_path", required=True, type=click.Path(exists=True))
@click.option("--kind", type=click.Choice(["points", "fibers"]), default="points")
@click.option("--k", required=True, type=int, help="Neighborhood size.")
@click.option("--gamma", type=float, default=0.0, help="Pruning fraction.")
@click.option("--cutoff", type=float, default=0.0,
              help="Fiber distance cutoff (fibers only).")
@click.option("--dense-cap", type=int, default=DEFAULT_DENSE_CAP)
@click.option("--output", default="-", help="Tree document path ('-' = stdout).")
def build(input_path, kind, k, gamma, cutoff, dense_cap, output):
    """Build a level set tree from a dataset."""
    try:
        data = _read_dataset(input_path, kind)
        manifest = formats.dataset_manifest(input_path, kind)
        log.info("dataset %s", manifest)
        log.info("building tree: k=%d gamma=%s backend=%s",
                 k, gamma, _kernels.backend())
        tree = build_tree_for(data, k, gamma, cutoff=cutoff, dense_cap=dense_cap)
        log.info("tree built: %d nodes, %d leaves",
                 len(tree.nodes), len(tree.leaves()))
        _write_json(tree.to_document(), output)
    except LevelTreeError as exc:
        _fail(exc)


@main.command()
@click.option("--tree", "tree_path", required=True, type=click.Path(exists=True))
@click.option("--method", type=click.Choice(["cut", "leaf", "first-k"]),
              required=True)
@click.option("--level", type=float, default=None, help="Cut level.")
@click.option("--scale", type=click.Choice(["mass", "density"]), default="mass")
@click.option("--k-clusters", "--K", "k_clusters", type=int, default=None,
              help="Cluster count for first-k.")
@click.option("--assign-background", is_flag=True, default=False)
@click.option("--k-assign", type=int, default=1)
@click.option("--input", "input_path", type=click.Path(exists=True), default=None,
              help="Dataset (required with --assign-background).")
@click.option("--kind", type=click.Choice(["points", "fibers"]), default="points")
@click.option("--cutoff", type=float, default=0.0)
@click.option("--output", default="-")
def cluster(tree_path, method, level, scale, k_clusters, assign_background,
            k_assign, input_path, kind, cutoff, output):
    """Extract cluster labels from a tree."""
    try:
        tree = formats.read_tree(tree_path)
        if method == "cut":
            if level is None:
                raise InvalidInputError("--level is required for the cut method")
            labeling = labeling_ops.cut_at(tree, level, scale=scale)
        elif method == "leaf":
            labeling = labeling_ops.all_mode(tree)
        else:
            if k_clusters is None:
                raise InvalidInputError("--k-clusters is required for first-k")
            labeling = labeling_ops.first_k(tree, k_clusters)
        if assign_background:
            if input_path is None:
                raise InvalidInputError("--assign-background requires --input")
            data = _read_dataset(input_path, kind)
            labeling = labeling_ops.assign_background(labeling, data, k_assign,
                                                      cutoff=cutoff)
        fg = labeling.foreground().size
        log.info("method=%s foreground=%d background=%d",
                 method, fg, labeling.n - fg)
        _write_json(labeling.to_document(), output)
    except LevelTreeError as exc:
        _fail(exc)


@main.command()
@click.option("--scenario", required=True,
              type=click.Choice(["six-gaussians", "arcs-and-gaussians",
                                 "endpoint-surrogate"]))
@click.option("--n", type=int, default=5000)
@click.option("--r", type=float, default=1.0, help="Contraction coefficient.")
@click.option("--seed", type=int, default=0)
@click.option("--output", default="-", help="Points CSV path.")
@click.option("--truth-output", default=None, help="Truth label CSV path.")
def simulate(scenario, n, r, seed, output, truth_output):
    """Draw one benchmark scenario dataset."""
    try:
        sc = generate(scenario, n, r, seed)
        log.info("generated %s: n=%d r=%s seed=%d", scenario, n, r, seed)
        rows = ["# leveltree points format_version=1"]
        rows += [",".join(repr(float(v)) for v in row) for row in sc.points]
        text = "\n".join(rows) + "\n"
        if output == "-":
            sys.stdout.write(text)
        else:
            with open(output, "w") as handle:
                handle.write(text)
        if truth_output:
            with open(truth_output, "w") as handle:
                handle.write("# leveltree truth format_version=1\n")
                handle.writelines(f"{int(t)}\n" for t in sc.truth)
    except LevelTreeError as exc:
        _fail(exc)


@main.command()
@click.option("--config", "config_path", type=click.Path(exists=True),
              default=None, help="JSON config (defaults used if omitted).")
@click.option("--output", default="-", help="Error report CSV path.")
@click.option("--processes", type=int, default=None,
              help="Parallel workers (overrides the config).")
def benchmark(config_path, output, processes):
    """Run the scenario/method benchmark grid."""
    try:
        config = {}
        if config_path:
            with open(config_path) as handle:
                config = json.load(handle)
        if processes is not None:
            config["processes"] = processes
        report = run_benchmark(config)
        if output == "-":
            report.write_csv(sys.stdout)
        else:
            with open(output, "w") as handle:
                report.write_csv(handle)
    except LevelTreeError as exc:
        _fail(exc)


@main.command()
@click.option("--input", "input_path", required=True, type=click.Path(exists=True))
@click.option("--kind", type=click.Choice(["points", "fibers"]), default="points")
@click.option("--k", required=True, type=int)
@click.option("--gamma", type=float, default=0.0)
@click.option("--cutoff", type=float, default=0.0)
@click.option("--subsamples", "-B", type=int, required=True)
@click.option("--size", "-m", type=int, required=True)
@click.option("--seed", type=int, default=0)
@click.option("--output", default="-", help="Stability report JSON path.")
@click.option("--mode-csv", default=None, help="Mode function CSV path.")
def stability(input_path, kind, k, gamma, cutoff, subsamples, size, seed,
              output, mode_csv):
    """Subsampling stability analysis."""
    try:
        data = _read_dataset(input_path, kind)
        log.info("stability: B=%d m=%d k=%d gamma=%s seed=%d",
                 subsamples, size, k, gamma, seed)
        report = subsample_trees(data, size, subsamples, k, gamma, seed,
                                 cutoff=cutoff)
        _write_json(report.to_document(), output)
        if mode_csv:
            with open(mode_csv, "w") as handle:
                report.write_mode_csv(handle)
    except LevelTreeError as exc:
        _fail(exc)


@main.command()
@click.option("--tree", "tree_path", required=True, type=click.Path(exists=True))
@click.option("--input", "input_path", type=click.Path(exists=True), default=None)
@click.option("--kind", type=click.Choice(["points", "fibers"]), default="points")
@click.option("--host", default="127.0.0.1")
@click.option("--port", type=int, default=8000)
@click.option("--static-dir", type=click.Path(exists=True), default=None,
              help="Explorer UI assets to serve at /.")
def serve(tree_path, input_path, kind, host, port, static_dir):
    """Serve the explorer API over a tree (and optionally its dataset)."""
    try:
        import uvicorn

        from .service import create_app

        tree = formats.read_tree(tree_path)
        dataset = _read_dataset(input_path, kind) if input_path else None
        app = create_app(tree, dataset, static_dir)
        log.info("serving on %s:%d (%d nodes)", host, port, len(tree.nodes))
        uvicorn.run(app, host=host, port=port, log_level="warning")
    except LevelTreeError as exc:
        _fail(exc)


if __name__ == "__main__":
    main()
