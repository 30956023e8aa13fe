"""
Gray-labelled QAM and PAM alphabets, hard decisions and max-log LLR demapping.

Labelling convention (frozen, golden vectors depend on it): points are indexed by their bit
label read MSB first, so `points[label]` is the point carrying that label. PAM amplitudes
2i - (order - 1) get label gray(i) = i ^ (i >> 1). Square QAM takes the high half of the label
bits for the in-phase PAM and the low half for the quadrature PAM.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from enum import Enum

import numpy as np

logger = logging.getLogger(__name__)

LLR_CLAMP = 64.0


class ConstellationKind(Enum):
    QAM = "qam"
    PAM = "pam"


def gray_code(n_bits: int) -> np.ndarray:
    i = np.arange(1 << n_bits, dtype=int)
    return i ^ (i >> 1)


def _gray_pam_points(order: int) -> np.ndarray:
    n_bits = int(np.log2(order))
    amplitudes = np.arange(order, dtype=float) * 2 - (order - 1)
    points = np.zeros(order, dtype=float)
    points[gray_code(n_bits)] = amplitudes
    return points


@dataclass(frozen=True, eq=False)
class Constellation:
    kind: ConstellationKind
    order: int
    points: np.ndarray
    bits_per_symbol: int
    # labels[i, b] = bit b (MSB first) of point i
    labels: np.ndarray

    @property
    def is_real(self) -> bool:
        return self.kind == ConstellationKind.PAM


def make_constellation(kind: ConstellationKind | str, order: int) -> Constellation:
    """
    Build a unit-average-energy Gray-labelled alphabet: 4/16/64-QAM or 2/4/8-PAM
    """
    kind = ConstellationKind(kind) if isinstance(kind, str) else kind
    bits = int(round(np.log2(order))) if order > 0 else 0
    if order < 2 or 2**bits != order:
        raise ValueError(f"Constellation order must be a power of two >= 2, got {order}")

    if kind == ConstellationKind.PAM:
        points = _gray_pam_points(order)
    else:
        if bits % 2:
            raise ValueError(f"Only square QAM is supported, got order {order}")
        half = bits // 2
        pam = _gray_pam_points(1 << half)
        labels = np.arange(order)
        points = pam[labels >> half] + 1j * pam[labels & ((1 << half) - 1)]

    points = points / np.sqrt(np.mean(np.abs(points) ** 2))
    labels = (np.arange(order)[:, np.newaxis] >> np.arange(bits - 1, -1, -1)) & 1
    return Constellation(kind=kind, order=order, points=points, bits_per_symbol=bits, labels=labels.astype(np.uint8))


def pam_for_qam(qam_order: int) -> Constellation:
    """
    PAM alphabet carrying half the bits of a square QAM symbol (64-QAM -> 8-PAM)
    """
    return make_constellation(ConstellationKind.PAM, int(round(np.sqrt(qam_order))))


def map_bits(bits, c: Constellation) -> np.ndarray:
    bits = np.asarray(bits, dtype=np.uint8).ravel()
    if bits.size % c.bits_per_symbol:
        raise ValueError(f"Bit count {bits.size} is not divisible by {c.bits_per_symbol} bits per symbol")
    groups = bits.reshape(-1, c.bits_per_symbol).astype(int)
    weights = 1 << np.arange(c.bits_per_symbol - 1, -1, -1)
    return c.points[groups @ weights]


def _distances(s_hat, c: Constellation) -> np.ndarray:
    s_hat = np.asarray(s_hat)
    return np.abs(s_hat[..., np.newaxis] - c.points) ** 2


def hard_decision(s_hat, c: Constellation):
    """
    Nearest point in Euclidean distance, ties broken by the lowest point index.
    Returns (points, bits) where bits has a trailing axis of bits_per_symbol.
    """
    idx = np.argmin(_distances(s_hat, c), axis=-1)
    return c.points[idx], c.labels[idx]


def llr_maxlog(s_hat, npi, c: Constellation, clamp: float = LLR_CLAMP) -> np.ndarray:
    """
    Max-log LLRs, positive when bit 0 is more likely:
    LLR_b = (min_{p: b=1} |s - p|^2 - min_{p: b=0} |s - p|^2) / npi, clamped to +-clamp.
    npi broadcasts against s_hat. Output has a trailing axis of bits_per_symbol.
    """
    npi = np.asarray(npi, dtype=float)
    if np.any(npi <= 0):
        raise ValueError("NPI variance must be strictly positive for LLR computation")

    d = _distances(s_hat, c)[..., np.newaxis, :]
    ones = c.labels.T.astype(bool)
    d1 = np.where(ones, d, np.inf).min(axis=-1)
    d0 = np.where(~ones, d, np.inf).min(axis=-1)
    llr = (d1 - d0) / npi[..., np.newaxis]
    return np.clip(llr, -clamp, clamp)


def llr_exact(s_hat, npi, c: Constellation) -> np.ndarray:
    """
    Exact log-sum-exp LLRs, kept as a reference for the max-log demapper
    """
    npi = np.asarray(npi, dtype=float)
    metric = -_distances(s_hat, c)[..., np.newaxis, :] / npi[..., np.newaxis, np.newaxis]
    ones = c.labels.T.astype(bool)
    l1 = np.logaddexp.reduce(np.where(ones, metric, -np.inf), axis=-1)
    l0 = np.logaddexp.reduce(np.where(~ones, metric, -np.inf), axis=-1)
    return l0 - l1
