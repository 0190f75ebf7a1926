"""Terminal rendering of reports, optima and run history."""

import math

from rich.console import Console
from rich.panel import Panel
from rich.table import Table

from .report import Report

console = Console()


def create_table(title: str, header_style: str, columns: list[dict], rows: list) -> Table:
    """Create a Rich table with the given configuration.

    Args:
        title: Table title
        header_style: Style for table headers
        columns: List of column configs with 'name', 'style', etc.
        rows: List of row data (tuples/lists matching column count)

    Returns:
        Configured Rich Table
    """
    table = Table(title=title, show_header=True, header_style=header_style)
    for col in columns:
        table.add_column(
            col["name"],
            style=col.get("style", ""),
            width=col.get("width"),
            justify=col.get("justify", "left"),
            overflow=col.get("overflow", "ellipsis"),
        )
    for row in rows:
        table.add_row(*row)
    return table


def format_value(value) -> str:
    """Compact text for costs and guesses; None shows as a dim dash."""
    if value is None:
        return "[dim]-[/dim]"
    if isinstance(value, str):
        return value
    value = float(value)
    if math.isinf(value):
        return "∞"
    return f"{value:.6g}"


def _format_centers(centers: list[str] | None) -> str:
    if not centers:
        return "[dim]<none>[/dim]"
    shown = ", ".join(centers[:8])
    return shown + (f" ... (+{len(centers) - 8})" if len(centers) > 8 else "")


def display_report(report: Report, verbose: bool = False) -> None:
    """Display a run report as panels and tables."""

    title = f"Run: {report.instance}" if report.instance else "Run"
    if report.solved:
        body = (
            f"[green]Solved[/green] with {len(report.centers)} center(s)\n"
            f"Centers: {_format_centers(report.centers)}\n"
            f"Guess tau: {format_value(report.tau)}\n"
            f"Cost: [bold]{format_value(report.cost)}[/bold] "
            f"(certified {format_value(report.certified_cost)})"
        )
        if report.exact_opt is not None:
            body += (
                f"\nExact optimum: {format_value(report.exact_opt)}"
                f"  ratio: [bold]{format_value(report.ratio)}[/bold]"
            )
        console.print(Panel(body, title=title, border_style="green"))
    else:
        body = "[red]Infeasible[/red]: every guess aborted or failed to finish"
        if report.exact_opt is not None:
            body += f"\nExact optimum: {format_value(report.exact_opt)}"
        console.print(Panel(body, title=title, border_style="red"))

    settings = [
        ("Algorithm", report.algorithm),
        ("Mode", report.mode),
        ("Finisher", report.finisher),
        ("Guesses", report.guesses),
        ("Epsilon", report.epsilon),
        ("Points", str(report.n)),
        ("Rank", str(report.rank)),
    ]
    if report.z is not None:
        settings.append(("Outliers (z)", str(report.z)))
    if report.k is not None:
        settings.append(("Centers (k)", str(report.k)))
    if report.budget is not None:
        settings.append(("Budget", report.budget))

    counters = [
        ("Peak stored (instance)", str(report.peak_points_stored)),
        ("Peak stored (all)", str(report.total_points_stored_peak)),
        ("Storage bound", format_value(report.storage_bound)),
        ("Independence calls", str(report.independence_calls)),
        ("Distance calls", str(report.distance_calls)),
    ]
    if report.trace:
        counters.append(("Instances spawned", str(report.trace.get("spawned", 0))))
    if report.wall_clock is not None:
        counters.append(("Wall clock", f"{report.wall_clock:.3f}s"))

    console.print(
        create_table(
            "Settings",
            "bold blue",
            [{"name": "Setting", "style": "cyan"}, {"name": "Value", "style": "bold"}],
            [(name, format_value(value)) for name, value in settings],
        )
    )
    console.print(
        create_table(
            "Resources",
            "bold magenta",
            [
                {"name": "Counter", "style": "cyan"},
                {"name": "Value", "style": "magenta", "justify": "right"},
            ],
            counters,
        )
    )

    if verbose and report.trace.get("events"):
        _display_events(report.trace["events"])


def _display_events(events: list[dict]) -> None:
    styles = {
        "aborted": "[red]Aborted[/red]",
        "replaced": "[yellow]Replaced[/yellow]",
        "finished": "[green]Finished[/green]",
        "failed": "[red dim]Failed[/red dim]",
    }
    console.print(
        create_table(
            f"Guess Events ({len(events)})",
            "bold yellow",
            [
                {"name": "Event", "width": 10},
                {"name": "Tau", "style": "cyan", "justify": "right"},
                {"name": "Position", "style": "dim", "justify": "right"},
                {"name": "Child tau", "style": "cyan", "justify": "right"},
            ],
            [
                (
                    styles.get(event["kind"], event["kind"]),
                    format_value(event["tau"]),
                    "end" if event["position"] < 0 else str(event["position"]),
                    format_value(event["child_tau"]),
                )
                for event in events
            ],
        )
    )


def display_optimum(
    cost,
    centers: list[str],
    baseline: tuple[str, list[str] | None, object] | None = None,
) -> None:
    """Display the exact optimum and, optionally, an offline baseline.

    Args:
        cost: Optimal cost
        centers: Labels of an optimal center set
        baseline: (name, center labels, cost) of the baseline, if computed
    """
    body = f"Optimal cost: [bold]{format_value(cost)}[/bold]\nCenters: {_format_centers(centers)}"
    if baseline is not None:
        name, baseline_centers, baseline_cost = baseline
        if baseline_centers is None:
            body += f"\n[dim]Baseline {name}: no solution[/dim]"
        else:
            body += (
                f"\nBaseline {name}: {format_value(baseline_cost)} "
                f"with {_format_centers(baseline_centers)}"
            )
    console.print(Panel(body, title="Exact Optimum", border_style="blue"))


def display_intersection(members: list[str], groups: int) -> None:
    """Display a maximum common independent set."""
    console.print(
        Panel(
            f"Size: [bold]{len(members)}[/bold] (of {groups} group(s))\n"
            f"Members: {_format_centers(members)}",
            title="Matroid Intersection",
            border_style="cyan",
        )
    )


def display_history(runs: list) -> None:
    """
    Display saved runs.

    Args:
        runs: List of RunRecord model instances, newest first
    """
    if not runs:
        console.print(
            "[yellow]No runs have been saved yet.[/yellow]\n"
            "Run 'matroid-center run INSTANCE --save' to record one."
        )
        return

    table = create_table(
        f"Saved Runs ({len(runs)} shown)",
        "bold blue",
        [
            {"name": "ID", "style": "cyan", "justify": "right"},
            {"name": "Saved", "style": "dim", "width": 19},
            {"name": "Instance", "style": "bold", "overflow": "fold"},
            {"name": "Mode"},
            {"name": "Guesses"},
            {"name": "Status"},
            {"name": "Cost", "justify": "right"},
            {"name": "Ratio", "style": "magenta", "justify": "right"},
        ],
        [
            (
                str(run.id),
                run.created_at.strftime("%Y-%m-%d %H:%M:%S"),
                run.instance_name or "[dim]<unnamed>[/dim]",
                run.mode,
                run.guesses or "[dim]-[/dim]",
                "[green]solved[/green]" if run.status == "solved" else f"[red]{run.status}[/red]",
                format_value(run.cost),
                format_value(run.ratio),
            )
            for run in runs
        ],
    )
    console.print(table)
    console.print("[dim]Tip: Use 'matroid-center show RUN_ID' to see a saved report[/dim]\n")
