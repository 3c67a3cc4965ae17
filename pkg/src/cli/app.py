import typer

from cli.scripts import experiment, presets, verify

app = typer.Typer(help="Simulator of the dissipative two-species Bose-Josephson junction")

app.command(name="run")(experiment.run)
app.command(name="sweep")(experiment.sweep)
app.command(name="verify")(verify.verify)
app.add_typer(presets.app, name="presets")

if __name__ == "__main__":
    app()
