from rich.table import Table


_STATUS_STYLE = {"PASS": "green", "FAIL": "bold red", "ERROR": "bold magenta"}


def check_table(outcomes) -> Table:
    """
    Render acceptance-suite outcomes as a Rich Table, one row per criterion.

    Args:
        outcomes: CriterionOutcome items from the check service.
    """
    table = Table(show_header=True, header_style="bold #366b68", border_style="bold #4a8784")
    table.add_column("ID", style="white", width=4)
    table.add_column("Criterion", style="white", no_wrap=True)
    table.add_column("Status", width=6)
    table.add_column("Deciding measurement", style="dim", max_width=34)
    table.add_column("Measured", style="cyan", justify="right")
    table.add_column("Target", justify="right")
    table.add_column("Tol", justify="right")
    table.add_column("Time", style="magenta", justify="right")

    for o in outcomes:
        style = _STATUS_STYLE.get(o.status, "white")
        table.add_row(
            o.id,
            o.title,
            f"[{style}]{o.status}[/]",
            o.label,
            f"{o.measured:.4g}",
            f"{o.target:.4g}",
            f"{o.tolerance:.2g}",
            f"{o.seconds:.1f}s",
        )
    return table
