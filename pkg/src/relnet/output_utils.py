"""
Output directory utilities and context managers.
"""

import logging
import shutil
import tempfile
from contextlib import contextmanager
from pathlib import Path
from typing import Generator, Union

import pandas as pd

from relnet.errors import ConfigError

logger = logging.getLogger(__name__)

FLOAT_FORMAT = "%.17g"


@contextmanager
def staged_output(out_dir: Union[str, Path]) -> Generator[Path, None, None]:
    """
    Context manager for writing a set of artifacts atomically.

    Files are written into a staging directory next to ``out_dir``. When
    the block finishes without error the staging directory replaces
    ``out_dir`` (files of an earlier run included); a failed run leaves
    no partial outputs behind and keeps the previous contents.

    Args:
        out_dir: Final output directory

    Yields:
        Staging directory to write into
    """
    out_dir = Path(out_dir)
    if out_dir.resolve() in (Path.cwd(), *Path.cwd().parents):
        raise ConfigError(f"Output directory {out_dir} would replace the working directory")
    out_dir.parent.mkdir(parents=True, exist_ok=True)
    staging = Path(tempfile.mkdtemp(prefix=f".{out_dir.name}-", dir=out_dir.parent))
    try:
        yield staging
        if out_dir.exists():
            shutil.rmtree(out_dir)
        staging.rename(out_dir)
        logger.debug(f"Committed outputs to {out_dir}")
    except Exception as e:
        logger.error(f"Discarding outputs for {out_dir}: {e}")
        raise
    finally:
        shutil.rmtree(staging, ignore_errors=True)


def write_table(frame: pd.DataFrame, path: Union[str, Path], sep: str = ",") -> None:
    """CSV (or TSV) with full float precision and no index."""
    frame.to_csv(path, sep=sep, index=False, float_format=FLOAT_FORMAT)


def write_text(text: str, path: Union[str, Path]) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        handle.write(text)
