# app/main.py - Command-line front end for the path cover pipelines

import json
import sys
from typing import Any, Dict, Optional

import click

from app.gallai_covers import __version__
from app.gallai_covers.config.settings import settings
from app.gallai_covers.tools.cover_tools import (
    EXIT_CODES,
    records_to_csv,
    run_bench,
    run_cover,
    run_fuzz,
    run_gen,
    run_oracle,
    run_verify,
)
from app.gallai_covers.utils.helpers import get_logger, parse_sizes
from app.gallai_covers.utils.validators import FAMILIES

logger = get_logger(__name__)

seed_option = click.option("--seed", type=int, default=None, envvar="GALLAI_SEED", show_envvar=True,
                           help="PRNG seed (defaults to GALLAI_SEED, then 0).")


def _fail(result: Dict[str, Any]) -> None:
    """Print an error result and leave with its exit code"""
    logger.debug(f"Command failed with a {result.get('kind')} error")
    click.echo(f"error: {result['message']}", err=True)
    for violation in result.get("violations", []):
        click.echo(f"  {violation}", err=True)
    sys.exit(EXIT_CODES.get(result.get("kind"), 1))


def _write(text: str, output: Optional[str]) -> None:
    if output:
        with open(output, "w", encoding="utf-8") as f:
            f.write(text)
    else:
        click.echo(text, nl=False)


@click.group()
@click.version_option(__version__, prog_name=settings.APP_NAME)
@click.pass_context
def cli(ctx):
    """Small path covers for series-parallel graphs and planar 3-trees."""
    logger.debug(f"{settings.APP_NAME} {__version__}: running {ctx.invoked_subcommand}")


@cli.command()
@click.argument("input_path", type=click.Path(dir_okay=False))
@click.option("--class", "graph_class", type=click.Choice(["sp", "3tree"]), default="sp", show_default=True,
              help="sp: graph JSON of a series-parallel graph; 3tree: stacking sequence JSON.")
@click.option("--emit", type=click.Path(dir_okay=False), help="Write the cover JSON here.")
@click.option("--dot", type=click.Path(dir_okay=False), help="Write the normalised SPQ-tree as DOT (class sp).")
@click.option("--report", type=click.Path(dir_okay=False), help="Write the bound report JSON (class 3tree).")
def cover(input_path, graph_class, emit, dot, report):
    """Cover INPUT_PATH and print its run record as CSV."""
    result = run_cover(input_path, graph_class, emit=emit, dot=dot, report=report)
    if result["status"] != "success":
        _fail(result)
    click.echo(records_to_csv([result["record"]]), nl=False)


@cli.command()
@click.argument("graph_path", type=click.Path(dir_okay=False))
@click.argument("cover_path", type=click.Path(dir_okay=False))
def verify(graph_path, cover_path):
    """Check that COVER_PATH partitions the edges of GRAPH_PATH into simple paths."""
    result = run_verify(graph_path, cover_path)
    if result["status"] != "success":
        _fail(result)
    click.echo(f"valid: {result['report'].size} paths")


@cli.command()
@click.option("--family", type=click.Choice(FAMILIES), required=True)
@click.option("--size", type=int, required=True, help="Vertex count.")
@seed_option
@click.option("--out", "output", type=click.Path(dir_okay=False), help="Write the JSON here instead of stdout.")
def gen(family, size, seed, output):
    """Generate one seeded instance (graph JSON or stacking JSON)."""
    result = run_gen(family, size, seed=seed, output=output)
    if result["status"] != "success":
        _fail(result)
    if not output:
        click.echo(json.dumps(result["document"]))


@cli.command()
@click.option("--family", type=click.Choice(FAMILIES), default="sp", show_default=True)
@click.option("--count", type=int, default=100, show_default=True)
@click.option("--max-n", type=int, default=40, show_default=True)
@seed_option
@click.option("--oracle-cap", type=int, default=None, help="Largest edge count checked against the oracle.")
@click.option("--workers", type=int, default=None, help="Worker processes.")
@click.option("--out", "output", type=click.Path(dir_okay=False), help="Write the CSV here instead of stdout.")
def fuzz(family, count, max_n, seed, oracle_cap, workers, output):
    """Cover, verify and bound-check a batch of seeded instances."""
    result = run_fuzz(family, count=count, max_n=max_n, seed=seed, oracle_cap=oracle_cap, workers=workers)
    if "records" in result:
        _write(records_to_csv(result["records"]), output)
    if result["status"] != "success":
        _fail(result)


@cli.command()
@click.option("--family", type=click.Choice(FAMILIES), default="sp", show_default=True)
@click.option("--sizes", default="1000,10000,100000", show_default=True, help="Comma-separated vertex counts.")
@seed_option
@click.option("--repeats", type=int, default=None, help="Timed runs per size; the fastest is kept.")
@click.option("--workers", type=int, default=1, show_default=True)
@click.option("--out", "output", type=click.Path(dir_okay=False), help="Write the CSV here instead of stdout.")
def bench(family, sizes, seed, repeats, workers, output):
    """Time the cover pipeline on growing instances."""
    try:
        size_list = parse_sizes(sizes)
    except ValueError:
        raise click.BadParameter(f"cannot parse '{sizes}'", param_hint="--sizes")

    result = run_bench(family, size_list, seed=seed, repeats=repeats, workers=workers)
    if result["status"] != "success":
        _fail(result)
    _write(records_to_csv(result["records"]), output)
    ratios = ", ".join("inf" if r == float("inf") else f"{r:.1f}" for r in result["ratios"])
    if ratios:
        click.echo(f"time ratios: {ratios}", err=True)
    if result["slope"] is not None:
        click.echo(f"log-log slope: {result['slope']:.2f}", err=True)


@cli.command()
@click.argument("input_path", type=click.Path(dir_okay=False))
@click.option("--node-limit", type=int, default=None, help="Search nodes before giving up.")
@click.option("--edge-cap", type=int, default=None, help="Largest edge count accepted.")
def oracle(input_path, node_limit, edge_cap):
    """Exact minimum path cover of a small graph or stacking file."""
    result = run_oracle(input_path, node_limit=node_limit, edge_cap=edge_cap)
    if result["status"] != "success":
        _fail(result)
    found = result["result"]
    click.echo(json.dumps({
        "min_size": found.min_size,
        "lower_bound": result["lower_bound"],
        "nodes_explored": found.nodes_explored,
        "paths": [list(p) for p in found.witness.paths],
    }))


if __name__ == "__main__":
    cli()
