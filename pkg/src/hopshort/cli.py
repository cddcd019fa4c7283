"""Command line front end over the experiment harness.

Every run command speaks the same JSON-lines record format as the
harness: one MetricsRecord per seed, appended to --out or printed to
stdout when --out is "-" or omitted. Exit codes are uniform: 0 when all
checks pass, 1 when any record failed an enabled check, 2 for a
configuration error (bad flags, malformed input, unusable fit).

Graphs come either from a named family (--family plus its parameters)
or from an edge-list file (--input); the two are mutually exclusive.
"""

from __future__ import annotations

import json
import sys
from typing import Optional, Sequence

import click

from . import _kernels, io
from .graph import Digraph
from .harness import (
    ALGORITHMS,
    FAMILIES,
    ExperimentConfig,
    GeneratorSpec,
    MetricsRecord,
    fit_scaling,
    generate,
    run_experiment,
)
from .reach import estimate_diameter


def _spec_from_flags(
    family: Optional[str],
    n: Optional[int],
    gen_seed: int,
    p: Optional[float],
    width: Optional[int],
    depth: Optional[int],
    extra_edges: Optional[int],
) -> GeneratorSpec:
    if family is None or n is None:
        raise click.UsageError("--family and --n are required together")
    return GeneratorSpec(
        family=family,
        n=n,
        seed=gen_seed,
        p=p,
        width=width,
        depth=depth,
        extra_edges=extra_edges,
    )


def _graph_options(fn):
    opts = [
        click.option(
            "--family",
            type=click.Choice(FAMILIES),
            default=None,
            help="Graph family to generate.",
        ),
        click.option("--n", type=int, default=None, help="Vertex count."),
        click.option(
            "--gen-seed",
            type=int,
            default=0,
            show_default=True,
            help="Seed for randomized families.",
        ),
        click.option("--p", type=float, default=None, help="random_dag edge probability."),
        click.option("--width", type=int, default=None, help="layered_grid width."),
        click.option("--depth", type=int, default=None, help="layered_grid depth."),
        click.option(
            "--extra-edges", type=int, default=None, help="path_plus_random extras."
        ),
        click.option(
            "--input",
            "input_path",
            type=click.Path(exists=True, dir_okay=False),
            default=None,
            help="Edge-list file instead of a generated family.",
        ),
    ]
    for opt in reversed(opts):
        fn = opt(fn)
    return fn


def _run_options(fn):
    opts = [
        click.option(
            "--seed",
            "seeds",
            type=int,
            multiple=True,
            help="Algorithm seed; repeat for a sweep. Defaults to 0.",
        ),
        click.option("--k", type=int, default=None, help="Sampling parameter."),
        click.option(
            "--out",
            type=str,
            default=None,
            help='Append JSON-lines records here; "-" or omitted prints them.',
        ),
        click.option(
            "--oracle",
            is_flag=True,
            help="Verify each run against the dense closure oracle.",
        ),
        click.option(
            "--workers",
            type=int,
            default=1,
            show_default=True,
            help="Thread pool width across seeds.",
        ),
    ]
    for opt in reversed(opts):
        fn = opt(fn)
    return fn


def _load_graph(input_path: Optional[str], **flags) -> tuple[Digraph, GeneratorSpec]:
    """Graph plus the spec echoed into records.

    File input yields no spec: records echo their generator, so the run
    commands insist on --family and only generate/diameter take --input.
    """
    if input_path is not None:
        if flags.get("family") is not None:
            raise click.UsageError("--input and --family are mutually exclusive")
        try:
            return io.read_edge_list(input_path), None
        except ValueError as exc:
            raise click.UsageError(str(exc))
    try:
        spec = _spec_from_flags(**flags)
        return generate(spec), spec
    except ValueError as exc:
        raise click.UsageError(str(exc))


def _run(cfg: ExperimentConfig, workers: int) -> None:
    # run_experiment appends to cfg.out itself; stdout is ours
    try:
        records = run_experiment(cfg, workers=workers)
    except ValueError as exc:
        raise click.UsageError(str(exc))
    if not cfg.out:
        for rec in records:
            click.echo(rec.to_json())
    if any(rec.failed for rec in records):
        for rec in records:
            if rec.failed:
                click.echo(f"check failed (seed {rec.seed}): {rec.oracle}", err=True)
        sys.exit(1)


def _experiment(
    algorithm: str,
    spec: Optional[GeneratorSpec],
    seeds: Sequence[int],
    k: Optional[int],
    oracle: bool,
    **extra,
) -> ExperimentConfig:
    if spec is None:
        raise click.UsageError(
            f"{algorithm} records echo their generator; use --family, not --input"
        )
    return ExperimentConfig(
        generator=spec,
        algorithm=algorithm,
        k=k,
        seeds=list(seeds) if seeds else [0],
        oracle_checks=oracle,
        **extra,
    )


def _parse_override(_ctx, _param, value):
    if value is None:
        return None
    try:
        d, kappa = (int(part) for part in value.split(","))
    except ValueError:
        raise click.UsageError("--scale-override takes two integers: D,KAPPA")
    return (d, kappa)


@click.group()
def main() -> None:
    """Reachability shortcutting experiments."""


@main.command("generate")
@_graph_options
@click.option("--out", type=str, default="-", show_default=True, help="Edge-list destination.")
def generate_cmd(input_path, out, **flags):
    """Write a generated graph as an edge list (header line, then edges)."""
    g, _ = _load_graph(input_path, **flags)
    if out == "-":
        click.echo(f"{g.n} {g.m}")
        for u, v in g.edges():
            click.echo(f"{u} {v}")
    else:
        io.write_edge_list(g, out)


@main.command("shortcut-seq")
@_graph_options
@_run_options
@click.option("--whp", is_flag=True, help="Repeat to the high-probability variant.")
@click.option(
    "--reps", type=int, default=None, help="Repetition count for --whp; default log2 n."
)
def shortcut_seq_cmd(input_path, seeds, k, out, oracle, workers, whp, reps, **flags):
    """Run the sequential shortcutter, one record per seed."""
    if reps is not None and not whp:
        raise click.UsageError("--reps needs --whp")
    _, spec = _load_graph(input_path, **flags)
    cfg = _experiment(
        "seq_whp" if whp else "seq",
        spec,
        seeds,
        k,
        oracle,
        repetitions=reps if whp else None,
        out=out if out != "-" else None,
    )
    _run(cfg, workers)


@main.command("shortcut-par")
@_graph_options
@_run_options
@click.option(
    "--scale-override",
    callback=_parse_override,
    default=None,
    help="Force the fringe machinery with a literal D,KAPPA scale.",
)
@click.option(
    "--calibrate",
    is_flag=True,
    help="Derive abort budgets from probe-run medians instead of the formula.",
)
def shortcut_par_cmd(
    input_path, seeds, k, out, oracle, workers, scale_override, calibrate, **flags
):
    """Run the parallel diameter-reduction shortcutter, one record per seed."""
    _, spec = _load_graph(input_path, **flags)
    cfg = _experiment(
        "parallel_diam",
        spec,
        seeds,
        k,
        oracle,
        scale_override=scale_override,
        calibrate=calibrate,
        out=out if out != "-" else None,
    )
    _run(cfg, workers)


@main.command("reach")
@_graph_options
@_run_options
def reach_cmd(input_path, seeds, k, out, oracle, workers, **flags):
    """Single-source reachability from vertex 0 through a hopset."""
    _, spec = _load_graph(input_path, **flags)
    cfg = _experiment(
        "reach", spec, seeds, k, oracle, out=out if out != "-" else None
    )
    _run(cfg, workers)


@main.command("congest")
@_graph_options
@_run_options
def congest_cmd(input_path, seeds, k, out, oracle, workers, **flags):
    """Simulated distributed reachability from vertex 0, with round ledger."""
    _, spec = _load_graph(input_path, **flags)
    cfg = _experiment(
        "congest", spec, seeds, k, oracle, out=out if out != "-" else None
    )
    _run(cfg, workers)


@main.command("diameter")
@_graph_options
@click.option("--seed", type=int, default=0, show_default=True)
@click.option(
    "--samples",
    type=int,
    default=None,
    help="BFS sources sampled; >= n (the default) is exact.",
)
def diameter_cmd(input_path, seed, samples, **flags):
    """Estimate the directed diameter by sampled forward BFS."""
    g, _ = _load_graph(input_path, **flags)
    count = g.n if samples is None else samples
    est = estimate_diameter(g, count, seed)
    click.echo(
        json.dumps(
            {"n": g.n, "m": g.m, "samples": min(count, g.n), "diameter": est},
            sort_keys=True,
        )
    )


@main.command("bench")
@_graph_options
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--k", type=int, default=None, help="Sampling parameter.")
@click.option(
    "--algorithm",
    type=click.Choice(ALGORITHMS),
    default="parallel_diam",
    show_default=True,
)
@click.option("--repeat", type=int, default=3, show_default=True, help="Timed runs.")
def bench_cmd(input_path, seed, k, algorithm, repeat, **flags):
    """Time an algorithm under the active kernel backend.

    Reports the backend in use; set HOPSHORT_PURE=1 to force the pure
    fallback and compare.
    """
    _, spec = _load_graph(input_path, **flags)
    if spec is None:
        raise click.UsageError("bench needs --family, not --input")
    cfg = ExperimentConfig(
        generator=spec, algorithm=algorithm, k=k, seeds=[seed]
    )
    times = []
    metrics = {}
    for _ in range(repeat):
        rec = run_experiment(cfg)[0]
        times.append(rec.wall_time)
        metrics = rec.metrics
    click.echo(
        json.dumps(
            {
                "backend": _kernels.BACKEND,
                "algorithm": algorithm,
                "n": spec.n,
                "best_wall_time": min(times),
                "wall_times": times,
                "metrics": metrics,
            },
            sort_keys=True,
        )
    )


@main.command("fit")
@click.option(
    "--records",
    "records_path",
    type=str,
    required=True,
    help='JSON-lines records file, "-" for stdin.',
)
@click.option("--field", required=True, help="Metric field to fit, e.g. shortcuts_added.")
def fit_cmd(records_path, field):
    """Fit the log-log growth exponent of a metric across graph sizes."""
    fh = sys.stdin if records_path == "-" else open(records_path, "r", encoding="utf-8")
    try:
        records = [
            MetricsRecord.from_json(line) for line in fh if line.strip()
        ]
    finally:
        if fh is not sys.stdin:
            fh.close()
    try:
        fit = fit_scaling(records, field)
    except (ValueError, TypeError, KeyError) as exc:
        raise click.UsageError(str(exc))
    click.echo(
        json.dumps(
            {
                "field": field,
                "slope": fit.slope,
                "intercept": fit.intercept,
                "residual": fit.residual,
                "medians": [list(pair) for pair in fit.medians],
            },
            sort_keys=True,
        )
    )


if __name__ == "__main__":
    main()
