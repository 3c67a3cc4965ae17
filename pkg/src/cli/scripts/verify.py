from typing import List, Optional

import typer

from cli.scripts.common import console, exit_codes, init_runtime
from constants import ExitCode
from harness import all_passed, render, run_criteria


def verify(
    quick: bool = typer.Option(True, "--quick/--full", help="Reduced sizes for CI, or desk-scale sizes."),
    only: Optional[List[int]] = typer.Option(None, "--only", help="Run only these criterion numbers."),
    threads: Optional[int] = typer.Option(None, "--threads", "-t", help="Worker count."),
) -> None:
    """Run the acceptance criteria and print measured against expected values."""
    with exit_codes():
        init_runtime(threads)
        with console.status(f"[bold green]Running {'quick' if quick else 'full'} acceptance suite...[/bold green]"):
            results = run_criteria(quick=quick, only=only or None)
    render(results, console)
    if not all_passed(results):
        raise typer.Exit(code=ExitCode.CRITERIA_FAILED.value)
