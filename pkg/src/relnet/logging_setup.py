"""
Console and file logging for the command-line tools.
"""

import logging
from pathlib import Path
from typing import Optional, Union

import coloredlogs

LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"


def setup_logging(level: str = "INFO", log_file: Optional[Union[str, Path]] = None) -> None:
    """
    Configure the root logger once per process.

    Args:
        level: Console and file level name
        log_file: Optional path of a plain-text log file
    """
    root = logging.getLogger()
    for handler in list(root.handlers):
        root.removeHandler(handler)

    coloredlogs.install(level=level.upper(), fmt=LOG_FORMAT, logger=root)

    if log_file is not None:
        Path(log_file).parent.mkdir(parents=True, exist_ok=True)
        file_handler = logging.FileHandler(log_file, encoding="utf-8")
        file_handler.setFormatter(logging.Formatter(LOG_FORMAT))
        file_handler.setLevel(level.upper())
        root.addHandler(file_handler)


def progress_enabled() -> bool:
    """Progress bars are shown only when INFO messages would be."""
    return logging.getLogger("relnet").isEnabledFor(logging.INFO)
