from typing import Optional

import typer

from cli.scripts.common import console, exit_codes, init_runtime, resolve_config
from harness import run as run_pipeline
from harness import run_sweep

ConfigOption = typer.Option(None, "--config", "-c", help="Experiment config file (JSON).")
PresetOption = typer.Option(None, "--preset", "-p", help="Named preset, see 'presets list'.")
OutOption = typer.Option(None, "--out", "-o", help="Result directory.")
SeedOption = typer.Option(None, "--seed", help="Override the 64-bit master seed.")
ThreadsOption = typer.Option(None, "--threads", "-t", help="Worker count (default: JUNCTION_THREADS or 1).")


def run(
    config: Optional[str] = ConfigOption,
    preset: Optional[str] = PresetOption,
    out: Optional[str] = OutOption,
    seed: Optional[int] = SeedOption,
    threads: Optional[int] = ThreadsOption,
) -> None:
    """Run one experiment and write its data files and manifest."""
    with exit_codes():
        init_runtime(threads)
        experiment = resolve_config(config, preset, seed, out)
        with console.status(f"[bold green]Running {experiment.name} ({experiment.scenario.value})...[/bold green]"):
            directory = run_pipeline(experiment)
        console.print(f"[bold green]Results written to[/bold green] {directory}")


def sweep(
    config: Optional[str] = ConfigOption,
    preset: Optional[str] = PresetOption,
    out: Optional[str] = OutOption,
    seed: Optional[int] = SeedOption,
    threads: Optional[int] = ThreadsOption,
) -> None:
    """Classify the dynamical regime at every point of the config's grid."""
    with exit_codes():
        init_runtime(threads)
        experiment = resolve_config(config, preset, seed, out)
        with console.status(f"[bold green]Sweeping {experiment.name}...[/bold green]"):
            directory = run_sweep(experiment)
        console.print(f"[bold green]Sweep table written to[/bold green] {directory}")
