from __future__ import annotations

import os
from pathlib import Path
from typing import Optional

from dotenv import load_dotenv

from constants import (
    DEFAULT_OUTPUT_ROOT,
    LOG_LEVEL_ENV,
    OUTPUT_ENV,
    THREADS_ENV,
)
from utils.logger import LoggerFactory
from utils.singleton_meta import SingletonMeta


class Config(metaclass=SingletonMeta):
    """Global runtime configuration singleton.

    Holds the settings that are not part of an experiment's physics: the number
    of parallel workers, the default output root and the log level. Values
    given explicitly win over environment variables (``JUNCTION_THREADS``,
    ``JUNCTION_OUTPUT``, ``JUNCTION_LOG_LEVEL``, optionally read from a
    ``.env`` file), which win over built-in defaults.

    Attributes:
        threads (int): Worker count for joblib; 1 means sequential.
        output_root (str): Absolute path under which result directories are created.
        log_level (str): Level name applied to every component logger.
    """

    def __init__(
        self,
        threads: Optional[int] = None,
        output_root: Optional[str] = None,
        log_level: Optional[str] = None,
    ) -> None:
        """Initializes the runtime configuration.

        Args:
            threads (Optional[int]): Worker count. Defaults to ``JUNCTION_THREADS`` or 1.
            output_root (Optional[str]): Result root. Defaults to ``JUNCTION_OUTPUT`` or ``results``.
            log_level (Optional[str]): Log level name. Defaults to ``JUNCTION_LOG_LEVEL`` or INFO.

        Raises:
            ValueError: If the resolved thread count is not a positive integer.
        """
        env_threads = os.environ.get(THREADS_ENV)
        resolved_threads = threads if threads is not None else int(env_threads or 1)
        if resolved_threads < 1:
            raise ValueError(f"threads must be >= 1, got {resolved_threads}")

        self.threads = resolved_threads
        self.output_root = str(
            Path(output_root or os.environ.get(OUTPUT_ENV) or DEFAULT_OUTPUT_ROOT).resolve()
        )
        self.log_level = (log_level or os.environ.get(LOG_LEVEL_ENV) or "INFO").upper()
        LoggerFactory.set_level(self.log_level)

    @classmethod
    def init(
        cls,
        threads: Optional[int] = None,
        output_root: Optional[str] = None,
        log_level: Optional[str] = None,
        env_file: Optional[str] = ".env",
    ) -> Config:
        """(Re)initializes the singleton, loading ``env_file`` first when present.

        Args:
            threads (Optional[int]): Worker count override.
            output_root (Optional[str]): Result root override.
            log_level (Optional[str]): Log level override.
            env_file (Optional[str]): Dotenv file to load. Defaults to ``.env``
                in the working directory; None disables loading.

        Returns:
            Config: The initialized singleton instance.
        """
        if env_file is not None:
            load_dotenv(dotenv_path=Path.cwd() / env_file)
        cls.reset()
        return cls(threads=threads, output_root=output_root, log_level=log_level)

    @classmethod
    def get(cls) -> Config:
        """Retrieves the singleton, creating it from the environment on first use.

        Library calls made outside the CLI (tests, notebooks) get a sequential
        configuration without having to call ``init``.

        Returns:
            Config: The existing configuration instance.
        """
        existing = cls.instance()
        if existing is None:
            return cls()
        return existing
