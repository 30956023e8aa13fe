"""
Welch PSD estimates and out-of-band leakage. Frequencies are in cycles per sample, shifted to
[-1/2, 1/2); subcarrier k of a K-point grid sits at f = k / K.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np
import pandas as pd
import scipy.fft
import scipy.signal

logger = logging.getLogger(__name__)

DEFAULT_OOB_GUARD = 2


@dataclass(frozen=True, eq=False)
class PsdRecord:
    freqs: np.ndarray
    # Power spectral density before normalization (density scaling, unit sample rate)
    psd: np.ndarray
    # PSD in dB relative to the in-band mean
    psd_db: np.ndarray
    in_band: np.ndarray
    out_of_band: np.ndarray

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({"freq_norm": self.freqs, "psd_db": self.psd_db})


def band_indices(freqs: np.ndarray, K: int, K_active: int, guard: int = DEFAULT_OOB_GUARD):
    """
    In-band bins lie inside the DC-centred active set minus one edge subcarrier; out-of-band
    bins lie at least `guard` subcarriers beyond its edge
    """
    if not 1 <= K_active <= K:
        raise ValueError(f"K_active must lie in [1, {K}], got {K_active}")
    # Active subcarriers -K_active/2 .. K_active/2 - 1 are centred on -1/2
    offset = np.abs(freqs * K + 0.5)
    in_band = np.flatnonzero(offset <= K_active / 2 - 1)
    out_of_band = np.flatnonzero(offset >= K_active / 2 + guard)
    return in_band, out_of_band


def psd_welch(
    x: np.ndarray,
    segment_length: int,
    overlap: float = 0.5,
    window: str = "hann",
    K: Optional[int] = None,
    K_active: Optional[int] = None,
    guard: int = DEFAULT_OOB_GUARD,
) -> PsdRecord:
    """
    Two-sided averaged periodogram. Without K every bin counts as in-band.
    """
    x = np.asarray(x)
    if segment_length < 2 or segment_length > x.size:
        raise ValueError(f"Segment length must lie in [2, {x.size}], got {segment_length}")
    if not 0.0 <= overlap < 1.0:
        raise ValueError(f"Overlap fraction must lie in [0, 1), got {overlap}")

    freqs, psd = scipy.signal.welch(
        x,
        fs=1.0,
        window=window,
        nperseg=segment_length,
        noverlap=int(segment_length * overlap),
        detrend=False,
        return_onesided=False,
        scaling="density",
    )
    freqs = scipy.fft.fftshift(freqs)
    psd = scipy.fft.fftshift(psd)

    if K is None:
        in_band, out_of_band = np.arange(freqs.size), np.array([], dtype=int)
    else:
        in_band, out_of_band = band_indices(freqs, K, K if K_active is None else K_active, guard)
    if in_band.size == 0:
        raise ValueError("Empty in-band region, use a longer segment")

    reference = psd[in_band].mean()
    psd_db = 10 * np.log10(np.maximum(psd, np.finfo(float).tiny) / reference)
    return PsdRecord(freqs=freqs, psd=psd, psd_db=psd_db, in_band=in_band, out_of_band=out_of_band)


def oob_ratio(record: PsdRecord) -> float:
    """
    Mean out-of-band power over mean in-band power, in dB
    """
    if record.in_band.size == 0 or record.out_of_band.size == 0:
        raise ValueError("oob_ratio needs non-empty in-band and out-of-band regions")
    if np.intersect1d(record.in_band, record.out_of_band).size:
        raise ValueError("In-band and out-of-band regions overlap")
    return float(10 * np.log10(record.psd[record.out_of_band].mean() / record.psd[record.in_band].mean()))
