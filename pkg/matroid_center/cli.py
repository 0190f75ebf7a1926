"""Command-line interface for streaming matroid center."""

from collections.abc import Iterator
from contextlib import contextmanager
from importlib.metadata import version
from pathlib import Path

import click
import numpy as np

from .config import RunConfig
from .database import init_database, list_runs, load_report, save_run
from .display import (
    console,
    display_history,
    display_intersection,
    display_optimum,
    display_report,
)
from .exceptions import InfeasibleInstanceError, MatroidCenterError, ResourceCapError
from .guesses import GuessMode
from .instance import Instance, generate_random, parse_instance, write_instance
from .intersection import IntersectionProblem, matroid_intersection
from .lowerbound import LowerBoundParams, gen_index_instance, verify_dichotomy
from .matroids import PartitionMatroid
from .offline import cover_cost
from .report import Report, render_markdown, write_report
from .runner import baseline_centers, exact_optimum, resolve_problem, run
from .streaming import Finisher, Mode

EXIT_INFEASIBLE = 1
EXIT_INPUT = 2
EXIT_CAP = 3

FORMATS = ("table", "json", "markdown")


@contextmanager
def _exit_codes(verbose: bool = False) -> Iterator[None]:
    """Print library errors and exit with the matching code."""
    try:
        yield
    except ResourceCapError as e:
        console.print(f"[bold red]Error:[/bold red] {e}")
        raise SystemExit(EXIT_CAP) from e
    except InfeasibleInstanceError as e:
        console.print(f"[bold red]Infeasible:[/bold red] {e}")
        raise SystemExit(EXIT_INFEASIBLE) from e
    except (MatroidCenterError, FileNotFoundError) as e:
        console.print(f"[bold red]Error:[/bold red] {e}")
        if verbose:
            import traceback

            console.print(f"[dim]{traceback.format_exc()}[/dim]")
        raise SystemExit(EXIT_INPUT) from e


def _load(path: Path, verbose: bool) -> Instance:
    with console.status("[bold green]Loading instance...", spinner="dots"):
        instance = parse_instance(path)
    if verbose:
        console.print(f"[dim]Loaded {instance.name or path.name}: {len(instance)} points[/dim]")
    return instance


def _emit(report: Report, fmt: str, verbose: bool) -> None:
    if fmt == "json":
        click.echo(report.to_json())
    elif fmt == "markdown":
        click.echo(render_markdown(report))
    else:
        display_report(report, verbose=verbose)


def _report_format(path: Path) -> str:
    return "markdown" if path.suffix.lower() in (".md", ".markdown") else "json"


def _settings(config: Path | None, **overrides) -> RunConfig:
    """Config file (or defaults) with the given command-line overrides."""
    try:
        base = RunConfig.from_yaml(config) if config else RunConfig()
        return base.with_overrides(**overrides)
    except ValueError as e:
        raise MatroidCenterError(str(e)) from e


@click.group()
@click.version_option(version=version("matroid-center-stream"))
@click.option(
    "--db",
    type=click.Path(dir_okay=False, path_type=Path),
    envvar="MATROID_CENTER_DB",
    help="Run history database (or set MATROID_CENTER_DB env var)",
)
@click.pass_context
def main(ctx: click.Context, db: Path | None):
    """Small-space streaming algorithms for matroid and knapsack center."""
    ctx.ensure_object(dict)
    ctx.obj["db"] = db


_mode_choice = click.Choice([m.value for m in Mode])


@main.command(name="run")
@click.argument("instance_path", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option(
    "--config",
    "-c",
    "config_path",
    type=click.Path(exists=True, dir_okay=False, path_type=Path),
    help="Path to run configuration YAML file",
)
@click.option("--epsilon", "-e", type=float, help="Accuracy parameter in (0, 1]")
@click.option("--mode", "-m", type=_mode_choice, help="Problem variant")
@click.option("--finisher", type=click.Choice([f.value for f in Finisher]), help="Offline step")
@click.option("--guesses", type=click.Choice([g.value for g in GuessMode]), help="Guess strategy")
@click.option("--passes", type=click.IntRange(1, 2), help="1, or 2 for the two-pass algorithm")
@click.option("--z", "z", type=click.IntRange(min=0), help="Number of outliers")
@click.option("--k", "k", type=click.IntRange(min=1), help="Number of centers (k-center modes)")
@click.option("--budget", type=float, help="Knapsack budget")
@click.option("--verify/--no-verify", default=None, help="Compute the exact optimum and ratio")
@click.option("--seed", type=int, help="Seed for --shuffle")
@click.option("--shuffle/--no-shuffle", default=None, help="Stream the points in random order")
@click.option("--cap", "brute_cap", type=click.IntRange(min=1), help="Brute-force finisher cap")
@click.option("--exact-cap", type=click.IntRange(min=1), help="Exact optimum point cap")
@click.option("--timing/--no-timing", default=None, help="Include wall-clock time")
@click.option(
    "--format", "-f", "fmt", type=click.Choice(FORMATS), default="table", help="Output format"
)
@click.option(
    "--report",
    "report_path",
    type=click.Path(dir_okay=False, path_type=Path),
    help="Also write the report (.md for Markdown, JSON otherwise)",
)
@click.option("--save", is_flag=True, help="Save the report to the run history")
@click.option("-v", "--verbose", is_flag=True, help="Enable verbose output")
@click.pass_context
def run_command(
    ctx: click.Context,
    instance_path: Path,
    config_path: Path | None,
    fmt: str,
    report_path: Path | None,
    save: bool,
    verbose: bool,
    **overrides,
):
    """Stream an instance and report the chosen centers."""

    with _exit_codes(verbose):
        config = _settings(config_path, **overrides)
        instance = _load(instance_path, verbose)
        if verbose:
            console.print(f"[dim]Settings: {config.to_dict()}[/dim]")

        progress = (lambda message: console.print(f"[dim]{message}[/dim]")) if verbose else None
        with console.status("[bold green]Streaming...", spinner="dots"):
            report = run(instance, config, progress=progress)

        _emit(report, fmt, verbose)

        if report_path:
            write_report(report, report_path, _report_format(report_path))
            if verbose:
                console.print(f"[dim]Report written to {report_path}[/dim]")

        if save:
            init_database(ctx.obj["db"])
            record = save_run(report, instance_path)
            console.print(f"[green]✓[/green] Saved as run {record.id}")

        if not report.solved:
            raise InfeasibleInstanceError("every guess aborted or failed to finish")


@main.group()
def generate():
    """Generate instance files."""


@generate.command(name="random")
@click.option("-n", "n", type=click.IntRange(min=1), default=20, help="Number of points")
@click.option("--clusters", type=click.IntRange(min=1), default=3, help="Planted clusters")
@click.option("--dim", type=click.IntRange(min=1), default=2, help="Dimension")
@click.option("--parts", type=click.IntRange(min=1), default=2, help="Partition matroid parts")
@click.option("--capacity", type=click.IntRange(min=0), default=1, help="Capacity of each part")
@click.option("--spread", type=float, default=1.0, help="Standard deviation within a cluster")
@click.option("--z", "z", type=click.IntRange(min=0), default=0, help="Far outliers to append")
@click.option("--k", "k", type=click.IntRange(min=1), help="Centers for k-center modes")
@click.option("--budget", type=float, help="Add weights and a knapsack budget")
@click.option("--seed", type=int, default=0, help="Random seed")
@click.option(
    "--output",
    "-o",
    type=click.Path(dir_okay=False, path_type=Path),
    required=True,
    help="Instance file to write",
)
def generate_random_command(output: Path, **options):
    """Seeded Euclidean instance with planted clusters."""
    with _exit_codes():
        try:
            document = generate_random(**options)
        except ValueError as e:
            raise MatroidCenterError(str(e)) from e
        write_instance(document, output)
    console.print(f"[green]✓[/green] Wrote {len(document['points'])} points to {output}")


@generate.command(name="lowerbound")
@click.option("--q", "q", type=click.IntRange(min=1), default=2, help="Side size (q^2 bits)")
@click.option("--bits", help="Bit string of length q^2 (random if omitted)")
@click.option("--index", type=click.IntRange(min=1), default=1, help="1-based queried bit")
@click.option("--bit", type=click.IntRange(0, 1), help="Force the queried bit")
@click.option("--delta", type=float, default=10.0, help="Distance between clusters")
@click.option("--seed", type=int, default=0, help="Seed for random bits")
@click.option("--permute", type=int, help="Shuffle the stream with this seed")
@click.option("--check", is_flag=True, help="Verify the optimum against the queried bit")
@click.option(
    "--output",
    "-o",
    type=click.Path(dir_okay=False, path_type=Path),
    required=True,
    help="Instance file to write",
)
def generate_lowerbound_command(
    q: int,
    bits: str | None,
    index: int,
    bit: int | None,
    delta: float,
    seed: int,
    permute: int | None,
    check: bool,
    output: Path,
):
    """Partition matroid instance whose optimum encodes one bit."""
    with _exit_codes():
        if bits is None:
            rng = np.random.default_rng(seed)
            bits = "".join(str(b) for b in rng.integers(0, 2, size=q * q))
        if bit is not None and 1 <= index <= len(bits):
            bits = bits[: index - 1] + str(bit) + bits[index:]
        try:
            params = LowerBoundParams(q, bits, index, delta)
        except ValueError as e:
            raise MatroidCenterError(str(e)) from e

        write_instance(gen_index_instance(params, permute).to_document(), output)
        console.print(
            f"[green]✓[/green] Wrote q={q} instance (bit {index} = {params.bit}) to {output}"
        )
        if check:
            if verify_dichotomy(params):
                console.print("[green]✓[/green] Optimum matches the queried bit")
            else:
                console.print("[bold red]Optimum does not match the queried bit[/bold red]")
                raise SystemExit(EXIT_INFEASIBLE)


@main.command()
@click.argument("instance_path", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option("--mode", "-m", type=_mode_choice, help="Problem variant")
@click.option("--z", "z", type=click.IntRange(min=0), help="Number of outliers")
@click.option("--k", "k", type=click.IntRange(min=1), help="Number of centers (k-center modes)")
@click.option("--budget", type=float, help="Knapsack budget")
@click.option("--cap", "exact_cap", type=click.IntRange(min=1), help="Exact optimum point cap")
@click.option("--baseline", is_flag=True, help="Also run the offline baseline")
@click.option("-v", "--verbose", is_flag=True, help="Enable verbose output")
def verify(instance_path: Path, baseline: bool, verbose: bool, **overrides):
    """Compute the exact optimum of an instance (no streaming)."""
    with _exit_codes(verbose):
        config = _settings(None, **overrides)
        instance = _load(instance_path, verbose)
        with console.status("[bold green]Enumerating center sets...", spinner="dots"):
            optimum = exact_optimum(instance, config)

        summary = None
        if baseline:
            name, centers = baseline_centers(instance, config)
            cost = None
            if centers is not None:
                problem = resolve_problem(instance, config)
                cost = cover_cost(problem.metric, instance.stream, centers, problem.z)
                centers = [instance.label(c) for c in centers]
            summary = (name, centers, cost)

        display_optimum(optimum.cost, [instance.label(c) for c in optimum.centers], summary)


@main.command()
@click.argument("instance_path", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option(
    "--capacity", type=click.IntRange(min=0), default=1, help="Centers allowed per group"
)
@click.option("-v", "--verbose", is_flag=True, help="Enable verbose output")
def intersect(instance_path: Path, capacity: int, verbose: bool):
    """
    Intersect the instance matroid with the partition given by point groups.

    Only points with a 'group' field take part. This exposes the matroid
    intersection routine for debugging.
    """
    with _exit_codes(verbose):
        instance = _load(instance_path, verbose)
        if instance.matroid is None:
            raise MatroidCenterError("Instance has no matroid section")
        if not instance.groups:
            raise MatroidCenterError("No point has a 'group' field")

        groups = sorted(set(instance.groups.values()))
        partition = PartitionMatroid(instance.groups, {g: capacity for g in groups})
        ground = sorted(instance.groups)
        problem = IntersectionProblem(ground, instance.matroid.restrict(ground), partition)
        members = matroid_intersection(problem)
        if verbose:
            console.print(f"[dim]{instance.matroid.calls} independence calls[/dim]")
        display_intersection([instance.label(e) for e in members], len(groups))


@main.command()
@click.option("--limit", "-n", type=int, default=20, help="Limit number of runs to display")
@click.option("--mode", "-m", type=_mode_choice, help="Only runs of this mode")
@click.pass_context
def history(ctx: click.Context, limit: int, mode: str | None):
    """
    Show saved runs, newest first.

    Examples:
        matroid-center history
        matroid-center history --limit 50
        matroid-center history --mode knapsack
    """
    init_database(ctx.obj["db"])
    display_history(list_runs(limit, mode))


@main.command()
@click.argument("run_id", type=int)
@click.option(
    "--format", "-f", "fmt", type=click.Choice(FORMATS), default="table", help="Output format"
)
@click.option("-v", "--verbose", is_flag=True, help="Show guess events")
@click.pass_context
def show(ctx: click.Context, run_id: int, fmt: str, verbose: bool):
    """Show a saved run report."""
    init_database(ctx.obj["db"])
    report = load_report(run_id)
    if report is None:
        console.print(
            f"[yellow]No saved run with id {run_id}[/yellow]\n"
            "Run 'matroid-center history' to list saved runs."
        )
        return
    _emit(report, fmt, verbose)


if __name__ == "__main__":
    main()
