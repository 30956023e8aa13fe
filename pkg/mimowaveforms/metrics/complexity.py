"""
Complex multiplications per frame for the whole uplink receiver. Each term is itemized so the
model's assumptions stay visible:

    FFT_n                 (n / 2) ceil(log2 n)
    fd_equalization       K M (B U^2 + B U + U^3 / 3 + 2 U^2)   Gram, MF, Cholesky, solves, bias
    antenna_transforms    B M FFT_K                             TD to FD per receive antenna
    user_demodulation     OFDM      0
                          SC-FDMA   U M FFT_K
                          GFDM      U (M FFT_K + K M^2)          direct length-M convolutions
                          FBMC      U M_pam (FFT_K + (L + K) / 2)
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, Optional, Union

import pandas as pd

from ..waveforms import WaveformKind
from ..waveforms.fbmc import OVERLAP


def fft_count(n: int) -> float:
    return n / 2 * math.ceil(math.log2(n)) if n > 1 else 0.0


@dataclass(frozen=True)
class ComplexityCount:
    waveform: WaveformKind
    B: int
    U: int
    K: int
    M: int
    terms: Dict[str, int] = field(default_factory=dict)

    @property
    def total(self) -> int:
        return sum(self.terms.values())

    def rows(self):
        for term, count in list(self.terms.items()) + [("total", self.total)]:
            yield {
                "waveform": self.waveform.value,
                "B": self.B,
                "U": self.U,
                "K": self.K,
                "M": self.M,
                "term": term,
                "count": count,
            }


def complexity_count(
    waveform: Union[WaveformKind, str], B: int, U: int, K: int, M: int, M_pam: Optional[int] = None
) -> ComplexityCount:
    waveform = WaveformKind(waveform)
    if min(B, U, K, M) < 1:
        raise ValueError(f"Dimensions must be positive, got B={B}, U={U}, K={K}, M={M}")
    M_pam = 2 * M if M_pam is None else M_pam
    fft_k = fft_count(K)

    if waveform == WaveformKind.OFDM:
        demod = 0.0
    elif waveform == WaveformKind.SCFDMA:
        demod = U * M * fft_k
    elif waveform == WaveformKind.GFDM:
        demod = U * (M * fft_k + K * M**2)
    else:
        demod = U * M_pam * (fft_k + (OVERLAP * K + K) / 2)

    terms = {
        "fd_equalization": round(K * M * (B * U**2 + B * U + U**3 / 3 + 2 * U**2)),
        "antenna_transforms": round(B * M * fft_k),
        "user_demodulation": round(demod),
    }
    return ComplexityCount(waveform=waveform, B=B, U=U, K=K, M=M, terms=terms)


def complexity_table(counts) -> pd.DataFrame:
    return pd.DataFrame([row for count in counts for row in count.rows()])
