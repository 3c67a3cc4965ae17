import logging
from logging import Logger
from pathlib import Path
from typing import Dict, Optional, Union

LOG_FORMAT = "[%(asctime)s] [%(levelname)s] [%(name)s]: %(message)s"
DATE_FORMAT = "%Y-%m-%d %H:%M:%S"


class LoggerFactory:
    """Centralized logger factory using a class-based registry.

    Every component asks for its logger by name (``CLASSICAL_DYNAMICS``,
    ``TWA``, ...). The first request creates a stdlib logger with one stream
    handler and the shared format; later requests return the cached instance
    with the level refreshed. Run directories can attach an extra file handler
    so each result folder carries its own ``run.log``.

    Attributes:
        _loggers_registry (Dict[str, Logger]): Initialized loggers by name.
        _default_level (int): Level applied to loggers created without one.
        _file_handlers (Dict[str, logging.FileHandler]): Active run-log handlers by path.
    """

    _loggers_registry: Dict[str, Logger] = {}
    _default_level: int = logging.INFO
    _file_handlers: Dict[str, logging.FileHandler] = {}

    @classmethod
    def get_logger(
        cls, name: str, level: Optional[int] = None, enable: bool = True
    ) -> Logger:
        """Retrieves or creates a configured logger instance.

        Args:
            name (str): The unique name of the logger.
            level (Optional[int]): Threshold level. Defaults to the factory-wide level.
            enable (bool): Whether the logger should emit records. Defaults to True.

        Returns:
            Logger: The configured logger instance.
        """
        effective_level = cls._default_level if level is None else level

        logger = cls._loggers_registry.get(name)
        if logger is None:
            logger = logging.getLogger(name)
            if not logger.handlers:
                handler = logging.StreamHandler()
                handler.setFormatter(logging.Formatter(LOG_FORMAT, DATE_FORMAT))
                logger.addHandler(handler)
                logger.propagate = False
            for file_handler in cls._file_handlers.values():
                logger.addHandler(file_handler)
            cls._loggers_registry[name] = logger

        logger.setLevel(effective_level)
        logger.disabled = not enable
        return logger

    @classmethod
    def set_level(cls, level: Union[int, str]) -> None:
        """Sets the level of every registered logger and of future ones.

        Args:
            level (Union[int, str]): Numeric level or a name such as ``"DEBUG"``.
        """
        numeric = logging.getLevelName(level.upper()) if isinstance(level, str) else level
        if not isinstance(numeric, int):
            raise ValueError(f"Unknown log level: {level}")
        cls._default_level = numeric
        for logger in cls._loggers_registry.values():
            logger.setLevel(numeric)

    @classmethod
    def attach_file(cls, path: Union[str, Path]) -> None:
        """Mirrors every logger into ``path`` until ``detach_file`` is called."""
        key = str(Path(path).resolve())
        if key in cls._file_handlers:
            return
        Path(key).parent.mkdir(parents=True, exist_ok=True)
        handler = logging.FileHandler(key, encoding="utf-8")
        handler.setFormatter(logging.Formatter(LOG_FORMAT, DATE_FORMAT))
        cls._file_handlers[key] = handler
        for logger in cls._loggers_registry.values():
            logger.addHandler(handler)

    @classmethod
    def detach_file(cls, path: Union[str, Path]) -> None:
        key = str(Path(path).resolve())
        handler = cls._file_handlers.pop(key, None)
        if handler is None:
            return
        for logger in cls._loggers_registry.values():
            logger.removeHandler(handler)
        handler.close()
