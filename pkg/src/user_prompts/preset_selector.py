from pathlib import Path
from typing import Dict, Literal

from questionary import path, select


class PresetSelector:
    """Handles interactive selection of a named experiment preset or a config file."""

    CONFIG_FILE_OPTION = "Other: (Load a config file)"

    def select_preset(
        self, presets: Dict[str, str], message: str = "Which experiment would you like to run?"
    ) -> str:
        """
        Prompts the user to pick one preset, or to point at a JSON config file.

        Args:
            presets (Dict[str, str]): Preset names mapped to one-line descriptions.
            message (str): The prompt message to display to the user.

        Returns:
            str: The chosen preset name, or the config path prefixed with ``file:``.
        """
        labels = {f"{name}  -  {description}": name for name, description in presets.items()}
        choices = [*labels, self.CONFIG_FILE_OPTION]

        selected = select(message=message, choices=choices, default=choices[0]).unsafe_ask()

        if selected == self.CONFIG_FILE_OPTION:
            config_path = path(
                message="Path to the experiment config (JSON):",
                validate=self._validate_config_path,
            ).unsafe_ask()
            return f"file:{config_path.strip()}"

        return labels[selected]

    def _validate_config_path(self, value: str) -> Literal[True] | str:
        """
        Validate that the entered path points at an existing file.

        Args:
            value (str): The path entered by the user.

        Returns:
            Literal[True] | str: True if valid, error message otherwise.
        """
        if value and Path(value.strip()).is_file():
            return True
        return "Config file does not exist."
