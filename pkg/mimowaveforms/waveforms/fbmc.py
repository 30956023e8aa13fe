"""
FBMC/OQAM with the PHYDYAS prototype (overlap factor 4).

Real PAM subsymbols d[m, k] are staggered by K/2 samples:
    x[n] = 1/sqrt(2) sum_{m,k} d[m, k] beta[m, k] p[n - mK/2] e^{j2 pi k n / K}
with beta[m, k] = e^{-j2 pi k (L - 1) / (2K)} j^{m + k}. The receiver windows, folds and
transforms each subsymbol, removes the phase and keeps the real part, scaled by sqrt(2).
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import cached_property

import numpy as np
import scipy.fft
import scipy.sparse

from .grid import FrameGrid

logger = logging.getLogger(__name__)

OVERLAP = 4
# PHYDYAS frequency-domain coefficients H_1..H_3 for overlap 4 (H_0 = 1)
PHYDYAS_COEFFICIENTS = (0.971960, 1 / np.sqrt(2), 0.235147)


@dataclass(frozen=True, eq=False)
class PhydyasPrototype:
    K: int
    # Real taps, length L = 4K, sum p^2 = 1
    p: np.ndarray

    @property
    def L(self) -> int:
        return self.p.size

    @property
    def polyphase(self) -> np.ndarray:
        """
        polyphase[l, k] = p[k + lK]: column k holds the taps of A_k[z]
        """
        return self.p.reshape(OVERLAP, self.K)


def phydyas_prototype(K: int) -> PhydyasPrototype:
    """
    Mid-point samples of the continuous PHYDYAS pulse:
    p[n] = 1 + 2 sum_l (-1)^l H_l cos(2 pi l (n + 1/2) / L), so that p[n] = p[L - 1 - n]
    """
    if K < 4 or K % 2:
        raise ValueError(f"FBMC needs an even number of subcarriers K >= 4, got {K}")
    L = OVERLAP * K
    n = np.arange(L) + 0.5
    p = np.ones(L)
    for l, H in enumerate(PHYDYAS_COEFFICIENTS, start=1):
        p += 2 * (-1) ** l * H * np.cos(2 * np.pi * l * n / L)
    p /= np.sqrt(np.sum(p**2))
    return PhydyasPrototype(K=K, p=p)


def frame_length(K: int, M_pam: int) -> int:
    """
    N_td = (M_pam - 1) K / 2 + L
    """
    return (M_pam - 1) * K // 2 + OVERLAP * K


def block_count(K: int, M_pam: int) -> int:
    """
    K-sample FD blocks needed to carry one frame (zero padded)
    """
    return -(-frame_length(K, M_pam) // K)


def phase_table(M_pam: int, K: int) -> np.ndarray:
    m = np.arange(M_pam)[:, np.newaxis]
    k = np.arange(K)[np.newaxis, :]
    L = OVERLAP * K
    return np.exp(-1j * np.pi * k * (L - 1) / K) * (1j ** ((m + k) % 4))


def _window_indices(M_pam: int, K: int) -> np.ndarray:
    return np.arange(M_pam)[:, np.newaxis] * (K // 2) + np.arange(OVERLAP * K)[np.newaxis, :]


def _alternating_sign(M_pam: int, K: int) -> np.ndarray:
    # e^{-j 2 pi k (mK/2) / K} = (-1)^{km}
    return 1.0 - 2.0 * ((np.arange(M_pam)[:, np.newaxis] * np.arange(K)[np.newaxis, :]) % 2)


def fbmc_modulate(g: FrameGrid, p: PhydyasPrototype) -> np.ndarray:
    """
    Polyphase synthesis: each subsymbol's K-point IDFT is repeated over the L-tap window,
    weighted by the prototype and overlap-added at a K/2 stride
    """
    if np.iscomplexobj(g.symbols) and np.any(np.imag(g.symbols) != 0):
        raise ValueError("FBMC/OQAM transmits real-valued PAM symbols only")
    d = np.real(g.symbols)
    M_pam, K = d.shape
    if K != p.K:
        raise ValueError(f"Grid has {K} subcarriers, prototype expects {p.K}")

    c = d * phase_table(M_pam, K) * _alternating_sign(M_pam, K)
    branches = scipy.fft.ifft(c, axis=1) * K
    windows = np.tile(branches, OVERLAP) * p.p

    x = np.zeros(frame_length(K, M_pam), dtype=complex)
    np.add.at(x, _window_indices(M_pam, K), windows)
    return x / np.sqrt(2)


def fbmc_demodulate_statistic(x_hat: np.ndarray, p: PhydyasPrototype, M_pam: int) -> np.ndarray:
    """
    Complex statistic before real-part extraction, shape (..., M_pam, K). Its imaginary part
    holds the intrinsic OQAM interference.
    """
    x_hat = np.asarray(x_hat)
    K = p.K
    N = frame_length(K, M_pam)
    if x_hat.shape[-1] < N:
        raise ValueError(f"FBMC frame needs at least {N} samples, got {x_hat.shape[-1]}")

    windows = x_hat[..., _window_indices(M_pam, K)] * p.p
    folded = windows.reshape(*windows.shape[:-1], OVERLAP, K).sum(axis=-2)
    z = scipy.fft.fft(folded, axis=-1)
    return np.sqrt(2) * z * _alternating_sign(M_pam, K) * np.conj(phase_table(M_pam, K))


def fbmc_demodulate(x_hat: np.ndarray, p: PhydyasPrototype, M_pam: int) -> np.ndarray:
    return np.real(fbmc_demodulate_statistic(x_hat, p, M_pam))


def build_p_matrix(p: PhydyasPrototype, M_pam: int) -> scipy.sparse.csr_matrix:
    """
    Sparse polyphase network P of shape (K M_pam, N_td), scaled so that a unitary DFT across
    subcarriers completes the receiver. Row k + mK picks the taps sqrt(2K) p[k + lK] at samples
    mK/2 + k + lK.
    """
    K = p.K
    rows = (np.arange(M_pam)[:, None, None] * K + np.arange(K)[None, None, :]) + np.zeros((1, OVERLAP, 1), dtype=int)
    cols = (
        np.arange(M_pam)[:, None, None] * (K // 2)
        + np.arange(OVERLAP)[None, :, None] * K
        + np.arange(K)[None, None, :]
    )
    vals = np.broadcast_to(np.sqrt(2 * K) * p.polyphase[np.newaxis], rows.shape)
    shape = (K * M_pam, frame_length(K, M_pam))
    return scipy.sparse.csr_matrix((vals.ravel(), (rows.ravel(), cols.ravel())), shape=shape)


def build_p_diag(p: PhydyasPrototype, M_pam: int) -> np.ndarray:
    """
    Main diagonal of P P^H, q[k + mK] = 2K sum_l p[k + lK]^2, without forming P
    """
    per_branch = 2 * p.K * np.sum(p.polyphase**2, axis=0)
    return np.tile(per_branch, M_pam)


def band_offsets(pp_h: scipy.sparse.spmatrix, tol: float = 1e-14) -> np.ndarray:
    """
    Sorted row offsets j - i of the non-negligible entries of a square sparse matrix
    """
    coo = scipy.sparse.coo_matrix(pp_h)
    keep = np.abs(coo.data) > tol
    return np.unique(coo.col[keep] - coo.row[keep])


@dataclass(frozen=True, eq=False)
class FbmcNpiConstants:
    K: int
    # Main diagonal of P P^H, length K M_pam
    q: np.ndarray

    @cached_property
    def subsymbol_means(self) -> np.ndarray:
        return self.q.reshape(-1, self.K).mean(axis=1)


def fbmc_npi_constants(p: PhydyasPrototype, M_pam: int) -> FbmcNpiConstants:
    return FbmcNpiConstants(K=p.K, q=build_p_diag(p, M_pam))


def fbmc_npi(v2, consts: FbmcNpiConstants) -> np.ndarray:
    """
    Per-subsymbol NPI of the complex statistic, v_hat^2_m = v^2 (1/K) sum_k q[k + mK].
    The real-part demapper sees half of it. v2 may be a scalar or a per-user array; the
    subsymbol axis is appended.
    """
    v2 = np.asarray(v2, dtype=float)
    if np.any(v2 <= 0):
        raise ValueError("TD NPI variance must be strictly positive")
    return v2[..., np.newaxis] * consts.subsymbol_means


def real_part_npi(v_hat2) -> np.ndarray:
    return np.asarray(v_hat2) / 2


def steady_state(x: np.ndarray, K: int) -> np.ndarray:
    """
    Drop the L - K/2 ramp samples at each end of a burst, where fewer than the full
    overlap of subsymbols contribute
    """
    ramp = OVERLAP * K - K // 2
    if x.size <= 2 * ramp:
        raise ValueError(f"Burst of {x.size} samples has no steady-state interior for K={K}")
    return x[ramp:-ramp]
