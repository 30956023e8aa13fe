from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import pandas as pd

from ..lithopswrapper import LithopsInvokerWrapper
from ..metrics.errors import ErrorCounters
from ..pipeline import SimConfig
from .link_trial import run_link_shard

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class LinkPoint:
    B: int
    U: int
    snr_db: float


def default_points(config: SimConfig) -> List[LinkPoint]:
    return [LinkPoint(config.B, config.U, snr) for snr in config.snr_db]


def trial_ranges(trials: int, shard_trials: int) -> List[Tuple[int, int]]:
    return [(start, min(start + shard_trials, trials)) for start in range(0, trials, shard_trials)]


def generate_link_iterdata(config: SimConfig, waveforms: Sequence[str], points: Sequence[LinkPoint]):
    """
    One shard per (waveform, point, trial range); shard boundaries depend on the configuration only
    """
    iterdata = [
        {
            "config": config,
            "waveform": waveform,
            "point_index": i,
            "B": point.B,
            "U": point.U,
            "snr_db": point.snr_db,
            "trial_start": start,
            "trial_stop": stop,
        }
        for waveform in waveforms
        for i, point in enumerate(points)
        for start, stop in trial_ranges(config.trials, config.shard_trials)
    ]
    return iterdata


def run_link(
    config: SimConfig,
    invoker: LithopsInvokerWrapper,
    waveforms: Optional[Sequence[str]] = None,
    points: Optional[Sequence[LinkPoint]] = None,
) -> Tuple[pd.DataFrame, pd.DataFrame]:
    """
    Execute the link simulation. Returns the error table (one row per waveform and point) and
    the LLR dump table (empty unless dump_llr is set).
    """
    waveforms = list(config.waveforms if waveforms is None else waveforms)
    points = default_points(config) if points is None else list(points)

    iterdata = generate_link_iterdata(config, waveforms, points)
    logger.debug("Running %d link shards for %d points", len(iterdata), len(points))
    results = invoker.map(run_link_shard, iterdata)

    # Merge in iterdata order
    merged = {(w, i): ErrorCounters() for w in waveforms for i in range(len(points))}
    llr_rows = []
    for result in results:
        key = (result["waveform"], result["point_index"])
        merged[key] = merged[key] + result["counters"]
        llr_rows.extend(result["llr_rows"])

    rows = []
    for (waveform, i), counters in merged.items():
        point = points[i]
        rows.append(
            {
                "waveform": waveform,
                "snr_db": point.snr_db,
                "B": point.B,
                "U": point.U,
                "ser": counters.ser,
                "ber": counters.ber,
                "fer": counters.fer,
                "trials": counters.frames // point.U,
            }
        )
        logger.info(
            "%s B=%d U=%d SNR=%.2f dB: SER=%.3e BER=%.3e FER=%.3e",
            waveform, point.B, point.U, point.snr_db, counters.ser, counters.ber, counters.fer,
        )

    llr_columns = ["waveform", "snr_db", "B", "U", "user", "bit", "llr"]
    return pd.DataFrame(rows), pd.DataFrame(llr_rows, columns=llr_columns)
