"""
Low-complexity GFDM: per-subcarrier circular filtering with the polyphase components of a
length-MK prototype, and the zero-forcing receiver that inverts it.

Frame layout: x[r + qK] = x_r[q], where x_r = g_r (*) dbar_r is the length-M circular convolution
of polyphase component g_r[q] = g[r + qK] with dbar[:, r], and dbar_m = idft(d_m). This equals the
direct form sum_{k,m} d[m, k] g[(n - mK) mod MK] e^{j2 pi k n / K} scaled by 1/sqrt(K). With
||g||^2 = K every output sample has unit average power for unit-energy symbols.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from enum import Enum
from functools import cached_property
from pathlib import Path
from typing import Union

import numpy as np
import pandas as pd
import scipy.fft

from ..exceptions import SingularFilterError
from ..numerics import RngStream, circ_conv, dft, gaussian_noise, idft
from .grid import FrameGrid

logger = logging.getLogger(__name__)

SINGULAR_BIN_THRESHOLD = 1e-12
NPI_CALIBRATION_SAMPLES = 1_000_000
NPI_CALIBRATION_SEED = 0x6F1D


class PulseShape(Enum):
    RRC = "rrc"
    RECT = "rect"


class NpiCalibration(Enum):
    MONTE_CARLO = "monte-carlo"
    ANALYTIC = "analytic"


@dataclass(frozen=True, eq=False)
class GfdmPrototype:
    K: int
    M: int
    # Real taps, length MK, ||g||^2 = K
    g: np.ndarray
    rolloff: float
    pulse: PulseShape = PulseShape.RRC

    @property
    def polyphase(self) -> np.ndarray:
        """
        polyphase[q, r] = g[r + qK]; column r is the length-M component g_r
        """
        return self.g.reshape(self.M, self.K)

    @cached_property
    def inverse_polyphase(self) -> np.ndarray:
        return gfdm_zf_filter(self)


def rrc_impulse(t: np.ndarray, rolloff: float) -> np.ndarray:
    """
    Root-raised-cosine impulse response for unit symbol period, with the removable
    singularities at t = 0 and t = +-1/(4 rolloff) replaced by their limits
    """
    t = np.asarray(t, dtype=float)
    a = rolloff
    h = np.empty_like(t)

    at_zero = np.isclose(t, 0.0, atol=1e-12)
    at_edge = np.isclose(np.abs(t), 1 / (4 * a), atol=1e-12) if a > 0 else np.zeros_like(t, dtype=bool)
    regular = ~(at_zero | at_edge)

    tr = t[regular]
    h[regular] = (np.sin(np.pi * tr * (1 - a)) + 4 * a * tr * np.cos(np.pi * tr * (1 + a))) / (
        np.pi * tr * (1 - (4 * a * tr) ** 2)
    )
    h[at_zero] = 1 - a + 4 * a / np.pi
    if a > 0:
        h[at_edge] = (a / np.sqrt(2)) * (
            (1 + 2 / np.pi) * np.sin(np.pi / (4 * a)) + (1 - 2 / np.pi) * np.cos(np.pi / (4 * a))
        )
    return h


def rrc_sample_times(K: int, M: int) -> np.ndarray:
    """
    Half-sample-offset grid in symbol periods, wrapped to [-M/2, M/2): t_n = (n + 1/2) / K.
    The offset keeps every polyphase spectrum away from the structural zero that a pulse
    symmetric about an integer sample has at bin M/2 of component K/2 when K and M are even.
    """
    N = M * K
    n = np.arange(N)
    return (np.mod(n + 0.5 + N / 2, N) - N / 2) / K


def direct_form_scale(K: int) -> float:
    """
    Global factor between the low-complexity modulator output and the direct-form sum
    """
    return 1.0 / np.sqrt(K)


def _normalize(g: np.ndarray, K: int) -> np.ndarray:
    return g * np.sqrt(K / np.sum(g**2))


def _check_dimensions(K: int, M: int):
    if K < 2 or M < 2:
        raise ValueError(f"GFDM requires K, M >= 2, got K={K}, M={M}")


def rrc_prototype(K: int, M: int, rolloff: float) -> GfdmPrototype:
    _check_dimensions(K, M)
    if not 0.0 <= rolloff <= 1.0:
        raise ValueError(f"Roll-off must lie in [0, 1], got {rolloff}")

    g = _normalize(rrc_impulse(rrc_sample_times(K, M), rolloff), K)
    proto = GfdmPrototype(K=K, M=M, g=g, rolloff=rolloff, pulse=PulseShape.RRC)
    # Reject singular configurations at construction time
    _ = proto.inverse_polyphase
    logger.debug("Built RRC prototype K=%d M=%d rolloff=%.3f", K, M, rolloff)
    return proto


def rect_prototype(K: int, M: int) -> GfdmPrototype:
    """
    Rectangular pulse covering the first K samples: every polyphase component is a delta and
    GFDM collapses to OFDM without a cyclic prefix
    """
    _check_dimensions(K, M)
    g = np.zeros(M * K)
    g[:K] = 1.0
    return GfdmPrototype(K=K, M=M, g=g, rolloff=0.0, pulse=PulseShape.RECT)


def make_prototype(K: int, M: int, pulse: Union[PulseShape, str] = PulseShape.RRC, rolloff: float = 0.25):
    if PulseShape(pulse) == PulseShape.RECT:
        return rect_prototype(K, M)
    return rrc_prototype(K, M, rolloff)


def gfdm_zf_filter(p: GfdmPrototype) -> np.ndarray:
    """
    Inverse polyphase components: column r of the result holds g~_r with
    circ_conv(g~_r, g_r) = delta, i.e. fft(g~_r) = 1 / fft(g_r) in the unnormalized convention
    """
    spectra = scipy.fft.fft(p.polyphase, axis=0)
    weakest = np.min(np.abs(spectra))
    if weakest < SINGULAR_BIN_THRESHOLD:
        bin_m, sub_k = np.unravel_index(np.argmin(np.abs(spectra)), spectra.shape)
        raise SingularFilterError(
            f"Polyphase component {sub_k} has a zero spectral bin {bin_m} (|G| = {weakest:.3g}), "
            "the prototype cannot be inverted"
        )
    return scipy.fft.ifft(1.0 / spectra, axis=0)


def gfdm_modulate(g: FrameGrid, p: GfdmPrototype) -> np.ndarray:
    """
    Low-complexity modulator, returns MK time-domain samples
    """
    if g.symbols.shape != (p.M, p.K):
        raise ValueError(f"Grid {g.symbols.shape} does not match prototype (M={p.M}, K={p.K})")
    dbar = idft(g.symbols, p.K, axis=1)
    x = circ_conv(p.polyphase, dbar, axis=0)
    return np.asarray(x, dtype=complex).ravel()


def gfdm_zf_demodulate(x_hat: np.ndarray, p: GfdmPrototype) -> np.ndarray:
    """
    Zero-forcing receiver. Accepts leading batch dimensions: x_hat has shape (..., MK) and the
    result has shape (..., M, K).
    """
    x_hat = np.asarray(x_hat)
    if x_hat.shape[-1] != p.M * p.K:
        raise ValueError(f"Expected {p.M * p.K} samples, got {x_hat.shape[-1]}")
    X = x_hat.reshape(*x_hat.shape[:-1], p.M, p.K)
    e = circ_conv(p.inverse_polyphase, X, axis=-2)
    return dft(e, p.K, axis=-1)


@dataclass(frozen=True, eq=False)
class GfdmNpiConstants:
    # sum_m |g~_{k,m}|^2 per subcarrier k
    subcarrier_sums: np.ndarray
    # (1/KM) sum_k sum_m |g~_{k,m}|^2
    aggregate: float
    # Ratio between the measured NPI and v^2 * aggregate
    c_cal: float
    calibration: NpiCalibration

    @property
    def gain(self) -> float:
        """
        v_hat^2 / v^2
        """
        return self.c_cal * self.aggregate


def _monte_carlo_c_cal(p: GfdmPrototype, aggregate: float, n_samples: int) -> float:
    frame = p.M * p.K
    n_frames = -(-n_samples // frame)
    rng = RngStream(NPI_CALIBRATION_SEED, (p.K, p.M))
    noise = gaussian_noise((n_frames, frame), 1.0, rng)
    d_hat = gfdm_zf_demodulate(noise, p)
    measured = np.mean(np.abs(d_hat) ** 2)
    return float(measured / aggregate)


def gfdm_npi_constants(
    p: GfdmPrototype,
    calibration: Union[NpiCalibration, str] = NpiCalibration.MONTE_CARLO,
    n_samples: int = NPI_CALIBRATION_SAMPLES,
) -> GfdmNpiConstants:
    """
    Offline NPI constants of a prototype. The literal per-subcarrier formula
    v~^2_k = (1/M) v^2 sum_m |g~_{k,m}|^2 underestimates the ZF output noise by a factor M with
    taps normalized to ||g||^2 = K; c_cal carries that factor, measured from white noise
    (fixed seed, so the constants are reproducible) or set to M exactly.
    """
    calibration = NpiCalibration(calibration)
    sums = np.sum(np.abs(p.inverse_polyphase) ** 2, axis=0)
    aggregate = float(np.mean(sums) / p.M)

    if calibration == NpiCalibration.ANALYTIC:
        c_cal = float(p.M)
    else:
        c_cal = _monte_carlo_c_cal(p, aggregate, n_samples)
        logger.debug("GFDM NPI calibration K=%d M=%d: c_cal=%.4f (analytic %d)", p.K, p.M, c_cal, p.M)
    return GfdmNpiConstants(subcarrier_sums=sums, aggregate=aggregate, c_cal=c_cal, calibration=calibration)


def gfdm_npi(v2, consts: GfdmNpiConstants) -> np.ndarray:
    """
    Per-symbol NPI after ZF demodulation of white TD noise with variance v2
    """
    v2 = np.asarray(v2, dtype=float)
    if np.any(v2 <= 0):
        raise ValueError("TD NPI variance must be strictly positive")
    return v2 * consts.gain


def export_taps_csv(taps: np.ndarray, path: Union[str, Path]):
    """
    Write prototype taps as (index, value) rows
    """
    taps = np.asarray(taps, dtype=float)
    pd.DataFrame({"index": np.arange(taps.size), "value": taps}).to_csv(path, index=False)
