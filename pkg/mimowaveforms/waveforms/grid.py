from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from ..constellation import Constellation, map_bits
from ..numerics import dft, idft


@dataclass(frozen=True, eq=False)
class FrameGrid:
    """
    One user's frame of constellation symbols. symbols[m, k] is d_{m,k}: row m is the block d_m.
    Inactive subcarriers hold zeros.
    """

    symbols: np.ndarray
    source_bits: np.ndarray

    @property
    def K(self) -> int:
        return self.symbols.shape[1]

    @property
    def M(self) -> int:
        return self.symbols.shape[0]


@dataclass(frozen=True, eq=False)
class FdBlocks:
    """
    Frequency-domain blocks s_0 .. s_{M'-1} of one user, blocks[m] has K entries
    """

    blocks: np.ndarray

    @property
    def K(self) -> int:
        return self.blocks.shape[1]

    @property
    def count(self) -> int:
        return self.blocks.shape[0]


def active_subcarriers(K: int, K_active: Optional[int] = None) -> np.ndarray:
    """
    DC-centred active set in ascending frequency order: subcarriers -K_active/2 .. K_active/2 - 1
    """
    K_active = K if K_active is None else K_active
    if not 1 <= K_active <= K:
        raise ValueError(f"K_active must lie in [1, {K}], got {K_active}")
    return (np.arange(K_active) - K_active // 2) % K


def random_frame(
    K: int, M: int, c: Constellation, rng: np.random.Generator, K_active: Optional[int] = None
) -> FrameGrid:
    active = active_subcarriers(K, K_active)
    bits = rng.integers(0, 2, size=M * active.size * c.bits_per_symbol, dtype=np.uint8)
    symbols = np.zeros((M, K), dtype=float if c.is_real else complex)
    symbols[:, active] = map_bits(bits, c).reshape(M, active.size)
    return FrameGrid(symbols=symbols, source_bits=bits)


def time_to_blocks(x: np.ndarray, K: int) -> FdBlocks:
    """
    Zero-pad a time-domain signal to a multiple of K, split it into K-sample blocks and take the
    DFT of each block
    """
    n_blocks = -(-x.size // K)
    padded = np.zeros(n_blocks * K, dtype=complex)
    padded[: x.size] = x
    return FdBlocks(blocks=dft(padded.reshape(n_blocks, K), K, axis=1))


def blocks_to_time(s_hat: np.ndarray) -> np.ndarray:
    """
    Inverse of time_to_blocks (without removing the zero padding)
    """
    return idft(s_hat, s_hat.shape[-1], axis=-1).reshape(*s_hat.shape[:-2], -1)
