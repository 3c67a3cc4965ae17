import typer
from rich.table import Table

from cli.scripts.common import console, exit_codes
from harness import DESCRIPTIONS, load_preset

app = typer.Typer(help="Named experiment presets.")


@app.command(name="list")
def list_presets() -> None:
    """List the available presets."""
    table = Table(title="Presets")
    table.add_column("Name", style="bold")
    table.add_column("Scenario")
    table.add_column("Description")
    for name, description in DESCRIPTIONS.items():
        table.add_row(name, load_preset(name).scenario.value, description)
    console.print(table)


@app.command(name="show")
def show_preset(name: str) -> None:
    """Print a preset as an editable JSON config."""
    with exit_codes():
        console.print_json(load_preset(name).model_dump_json())
