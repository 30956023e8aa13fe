from __future__ import annotations

import hashlib
import logging
import os
import sys
from dataclasses import asdict
from pathlib import Path
from pprint import pformat
from typing import TYPE_CHECKING, Union

import pandas as pd

if TYPE_CHECKING:
    from .pipeline import SimConfig

logger = logging.getLogger(__name__)

FLOAT_FORMAT = "%.10g"


def setup_logging(level=logging.INFO):
    sim_logger = logging.getLogger("mimowaveforms")
    sim_logger.propagate = False

    sim_logger.setLevel(level)
    if not sim_logger.handlers:
        sh = logging.StreamHandler(stream=sys.stdout)
        sh.setLevel(logging.DEBUG)
        formatter = logging.Formatter("%(asctime)s [%(levelname)s] %(name)s:%(lineno)s - %(message)s")
        sh.setFormatter(formatter)
        sim_logger.addHandler(sh)

    # Format Lithops logger the same way as the mimowaveforms logger
    lithops_logger = logging.getLogger("lithops")
    lithops_logger.propagate = False

    lithops_logger.setLevel(level)
    if not lithops_logger.handlers:
        sh = logging.StreamHandler(stream=sys.stdout)
        sh.setLevel(logging.INFO)
        formatter = logging.Formatter("%(asctime)s [%(levelname)s] %(name)s - %(message)s")
        sh.setFormatter(formatter)
        lithops_logger.addHandler(sh)


def log_parameters(config: SimConfig):
    logger.debug("Simulation parameters:\n" + pformat(asdict(config)))


def resolve_threads(threads: int) -> int:
    return (os.cpu_count() or 1) if threads == 0 else threads


def write_table(df: pd.DataFrame, output_dir: Union[str, Path], name: str, file_format: str = "csv") -> Path:
    """
    Write a result table as <name>.csv or <name>.parquet. CSV floats use a fixed format so
    identical results give identical bytes.
    """
    output_dir = Path(output_dir)
    output_dir.mkdir(parents=True, exist_ok=True)
    if file_format == "parquet":
        path = output_dir / f"{name}.parquet"
        df.to_parquet(path, engine="pyarrow", index=False)
    else:
        path = output_dir / f"{name}.csv"
        df.to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    logger.debug("Wrote %d rows to %s", len(df), path)
    return path


def file_sha256(path: Union[str, Path]) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(1 << 16), b""):
            digest.update(chunk)
    return digest.hexdigest()


def text_sha256(text: str) -> str:
    return hashlib.sha256(text.encode()).hexdigest()
