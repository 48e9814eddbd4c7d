import logging
import os
from typing import Dict, Optional, Union

import colorlog

LEVEL_ENV = "LOGGING_LEVEL"


class LoggingFactory:
    """Colored loggers, one per convembed subsystem.

    Subsystems get a fixed color so interleaved output of a run stays readable;
    other names cycle through the remaining colors.
    """

    subsystem_colors = {
        "corpus": "cyan",
        "synthetic": "cyan",
        "trainer": "green",
        "checkpoint": "green",
        "eval": "purple",
        "experiment": "blue",
    }
    spare_colors = ["yellow", "white", "red"]
    spare_index = 0
    loggers: Dict[str, logging.Logger] = {}

    @classmethod
    def _color_for(cls, name: str) -> str:
        if name in cls.subsystem_colors:
            return cls.subsystem_colors[name]
        color = cls.spare_colors[cls.spare_index]
        cls.spare_index = (cls.spare_index + 1) % len(cls.spare_colors)
        return color

    @staticmethod
    def default_level() -> Union[int, str]:
        return os.getenv(LEVEL_ENV, logging.INFO)

    @classmethod
    def get_logger(cls, name: str, level: Optional[Union[int, str]] = None) -> logging.Logger:
        if name in cls.loggers:
            if level is not None:
                cls.loggers[name].setLevel(level)
            return cls.loggers[name]

        handler = colorlog.StreamHandler()
        handler.setFormatter(
            colorlog.ColoredFormatter(
                f"%({cls._color_for(name)})s[%(name)s]%(reset)s %(log_color)s%(levelname)s%(reset)s %(message)s",
                log_colors={"DEBUG": "white", "INFO": "green", "WARNING": "yellow", "ERROR": "red"},
            )
        )

        logger = colorlog.getLogger(name)
        logger.addHandler(handler)
        logger.propagate = False
        logger.setLevel(level if level is not None else cls.default_level())

        cls.loggers[name] = logger
        return logger

    @classmethod
    def set_level(cls, level: Union[int, str]) -> None:
        """Apply a level to every logger created so far and to future ones."""
        os.environ[LEVEL_ENV] = level if isinstance(level, str) else logging.getLevelName(level)
        for logger in cls.loggers.values():
            logger.setLevel(level)
