import sys
from contextlib import contextmanager
from typing import Iterator, Optional

import typer
from rich.console import Console

from config import Config
from constants import ExitCode
from errors import ConfigError, JunctionSimError
from harness import DESCRIPTIONS, ExperimentConfig, load_preset
from user_prompts.preset_selector import PresetSelector
from utils.logger import LoggerFactory

logger = LoggerFactory.get_logger(name="CLI")

console = Console(log_path=False, log_time_format="[%Y-%m-%d %H:%M:%S]")

CONFIG_FILE_PREFIX = "file:"


def interactive() -> bool:
    return sys.stdin.isatty() and sys.stdout.isatty()


def resolve_config(
    config_path: Optional[str],
    preset: Optional[str],
    seed: Optional[int],
    out: Optional[str],
) -> ExperimentConfig:
    """Builds the experiment from ``--config``, ``--preset`` or an interactive choice.

    Raises:
        ConfigError: If both or neither source is given on a non-interactive terminal,
            or the chosen source fails validation.
    """
    if config_path and preset:
        raise ConfigError("Pass either --config or --preset, not both")
    if not config_path and not preset:
        if not interactive():
            raise ConfigError("No experiment given", ["pass --config FILE or --preset NAME"])
        choice = PresetSelector().select_preset(DESCRIPTIONS)
        if choice.startswith(CONFIG_FILE_PREFIX):
            config_path = choice.removeprefix(CONFIG_FILE_PREFIX)
        else:
            preset = choice
    experiment = ExperimentConfig.load(config_path) if config_path else load_preset(preset or "")
    return experiment.with_overrides(seed=seed, output_dir=out)


@contextmanager
def exit_codes() -> Iterator[None]:
    """Maps library errors onto the documented exit codes."""
    try:
        yield
    except ConfigError as error:
        console.print(f"[bold red]Configuration error:[/bold red] {error}")
        raise typer.Exit(code=ExitCode.CONFIG_ERROR.value) from error
    except JunctionSimError as error:
        console.print(f"[bold red]{type(error).__name__}:[/bold red] {error}")
        raise typer.Exit(code=ExitCode.RUN_FAILED.value) from error


def init_runtime(threads: Optional[int], out_root: Optional[str] = None) -> Config:
    try:
        return Config.init(threads=threads, output_root=out_root)
    except ValueError as error:
        raise ConfigError(str(error), [f"threads: {threads}"]) from error
