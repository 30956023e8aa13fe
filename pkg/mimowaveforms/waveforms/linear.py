"""
OFDM and SC-FDMA: the two baseline waveforms. Both map a K-subcarrier block straight onto one
FD block, so no cyclic prefix is simulated; the channel acts per subcarrier.
"""
from __future__ import annotations

import logging
from typing import Optional, Tuple

import numpy as np

from ..equalizer import EqualizedFrame
from ..numerics import dft, idft
from .grid import FdBlocks, FrameGrid, active_subcarriers

logger = logging.getLogger(__name__)


def ofdm_modulate(g: FrameGrid) -> FdBlocks:
    return FdBlocks(blocks=np.array(g.symbols, dtype=complex))


def scfdma_modulate(g: FrameGrid, K_active: Optional[int] = None) -> FdBlocks:
    """
    DFT-precode the active subcarriers of each block: s_m = F d_m, taken over the active
    subcarriers in ascending index order
    """
    active = np.sort(active_subcarriers(g.K, K_active))
    blocks = np.zeros(g.symbols.shape, dtype=complex)
    blocks[:, active] = dft(g.symbols[:, active], active.size, axis=1)
    return FdBlocks(blocks=blocks)


def ofdm_demodulate(eq: EqualizedFrame, user: int = 0) -> Tuple[np.ndarray, np.ndarray]:
    """
    Identity demapping: per-symbol NPI equals the per-subcarrier post-equalization NPI
    """
    return eq.s_hat[user], eq.npi_fd[user]


def scfdma_demodulate(
    eq: EqualizedFrame, user: int = 0, K_active: Optional[int] = None
) -> Tuple[np.ndarray, np.ndarray]:
    """
    d_m = F^H s_m on the active subcarriers. The TD NPI of block m is the mean of the
    per-subcarrier NPI over the active set (uncorrelated-error approximation), returned with
    shape (M, 1) so it broadcasts over the block.
    """
    s_hat, npi_fd = eq.s_hat[user], eq.npi_fd[user]
    K = s_hat.shape[-1]
    active = np.sort(active_subcarriers(K, K_active))
    symbols = np.zeros(s_hat.shape, dtype=complex)
    symbols[:, active] = idft(s_hat[:, active], active.size, axis=1)
    npi = npi_fd[:, active].mean(axis=1, keepdims=True)
    return symbols, npi


def ofdm_time_signal(g: FrameGrid) -> np.ndarray:
    return idft(ofdm_modulate(g).blocks, g.K, axis=1).ravel()


def scfdma_time_signal(g: FrameGrid, K_active: Optional[int] = None) -> np.ndarray:
    return idft(scfdma_modulate(g, K_active).blocks, g.K, axis=1).ravel()
