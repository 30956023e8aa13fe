from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Iterable

import numpy as np
import pandas as pd
import scipy.signal

logger = logging.getLogger(__name__)

CCDF_STEP_DB = 0.1
OVERSAMPLE_FACTORS = (1, 2, 4)


@dataclass(frozen=True, eq=False)
class PaprRecord:
    # PAPR of every frame in dB
    papr_db: np.ndarray
    thresholds_db: np.ndarray
    # Pr(PAPR > threshold)
    ccdf: np.ndarray

    def threshold_at(self, probability: float) -> float:
        """
        Lowest threshold whose exceedance probability is at most `probability`
        """
        below = np.flatnonzero(self.ccdf <= probability)
        return float(self.thresholds_db[below[0]]) if below.size else float(self.thresholds_db[-1])

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({"threshold_db": self.thresholds_db, "ccdf": self.ccdf})


def oversample(segments: np.ndarray, factor: int) -> np.ndarray:
    """
    Spectral zero padding of each periodic segment (rows of a 2-D array)
    """
    segments = np.atleast_2d(segments)
    if factor == 1:
        return segments
    return scipy.signal.resample(segments, segments.shape[-1] * factor, axis=-1)


def papr_db(segments, factor: int = 1) -> float:
    """
    max|x|^2 / mean|x|^2 in dB over all samples of one frame, after oversampling each segment
    """
    segments = np.asarray(segments)
    if segments.size == 0:
        raise ValueError("Cannot compute the PAPR of an empty frame")
    power = np.abs(oversample(segments, factor)) ** 2
    mean = power.mean()
    if mean == 0:
        raise ValueError("Cannot compute the PAPR of an all-zero frame")
    return float(10 * np.log10(power.max() / mean))


def ccdf(papr_values: np.ndarray, thresholds_db: np.ndarray) -> np.ndarray:
    papr_values = np.asarray(papr_values, dtype=float)
    return (papr_values[np.newaxis, :] > thresholds_db[:, np.newaxis]).mean(axis=1)


def papr_ccdf(frames: Iterable, factor: int = 4, step_db: float = CCDF_STEP_DB) -> PaprRecord:
    """
    PAPR per frame and its empirical CCDF. Each frame is either a 1-D signal or a 2-D stack of
    periodic segments that are oversampled independently.
    """
    if factor not in OVERSAMPLE_FACTORS:
        raise ValueError(f"Oversampling factor must be one of {OVERSAMPLE_FACTORS}, got {factor}")
    values = np.array([papr_db(frame, factor) for frame in frames])
    if values.size == 0:
        raise ValueError("No frames to evaluate")

    top = np.ceil(values.max() / step_db) * step_db
    thresholds = np.round(np.arange(0.0, top + step_db / 2, step_db), 6)
    logger.debug("PAPR over %d frames: median %.2f dB, max %.2f dB", values.size, np.median(values), values.max())
    return PaprRecord(papr_db=values, thresholds_db=thresholds, ccdf=ccdf(values, thresholds))
