"""
Per-subcarrier MU-MIMO uplink channel: y_{k,m} = H_{k,m} s_{k,m} + n_{k,m}.

Gains are stored as H[k, m, i, j] (subcarrier, coherence block, receive antenna, user). With
per-frame coherence the block axis has length 1 and broadcasts over every FD block of the frame.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Sequence, Union

import numpy as np
import pandas as pd
import scipy.fft

from .numerics import RngStream, gaussian_noise
from .waveforms.grid import FdBlocks

logger = logging.getLogger(__name__)

DEFAULT_TDL_TAPS = 4
DEFAULT_TDL_DECAY = 1.0


class ChannelModel(Enum):
    IID_RAYLEIGH = "iid-rayleigh"
    TAPPED_DELAY_LINE = "tapped-delay-line"
    # Unit gains from user j to antenna j, for loopback checks
    IDENTITY = "identity"


class Coherence(Enum):
    PER_FRAME = "per-frame"
    PER_BLOCK = "per-block"


@dataclass(frozen=True, eq=False)
class ChannelRealization:
    # Complex gains, shape (K, 1 or M', B, U)
    H: np.ndarray
    model: ChannelModel
    coherence: Coherence
    # Number of FD blocks M' the realization covers
    n_blocks: int

    @property
    def K(self) -> int:
        return self.H.shape[0]

    @property
    def B(self) -> int:
        return self.H.shape[2]

    @property
    def U(self) -> int:
        return self.H.shape[3]

    def expanded(self) -> np.ndarray:
        """
        Gains broadcast to the full (K, M', B, U) grid
        """
        return np.broadcast_to(self.H, (self.K, self.n_blocks, self.B, self.U))


@dataclass(frozen=True, eq=False)
class ReceivedFrame:
    # Received FD samples, shape (K, M', B)
    y: np.ndarray
    N0: float


def tdl_power_profile(n_taps: int, decay: float = DEFAULT_TDL_DECAY) -> np.ndarray:
    """
    Exponentially decaying tap powers exp(-l / decay), normalized to unit total power
    """
    profile = np.exp(-np.arange(n_taps) / decay)
    return profile / profile.sum()


def generate_channel(
    B: int,
    U: int,
    K: int,
    n_blocks: int,
    model: Union[ChannelModel, str],
    coherence: Union[Coherence, str],
    rng: Union[RngStream, np.random.Generator],
    n_taps: int = DEFAULT_TDL_TAPS,
    decay: float = DEFAULT_TDL_DECAY,
) -> ChannelRealization:
    """
    Draw one channel realization with unit average power per entry.

    iid-rayleigh draws every gain independently. tapped-delay-line draws n_taps independent
    taps per (antenna, user) pair and takes their length-K frequency response, so adjacent
    subcarriers are correlated.
    """
    model = ChannelModel(model)
    coherence = Coherence(coherence)
    if U < 1 or B < U:
        raise ValueError(f"Channel requires B >= U >= 1, got B={B}, U={U}")
    if K < 1 or n_blocks < 1:
        raise ValueError(f"Channel requires K >= 1 and at least one block, got K={K}, blocks={n_blocks}")

    gen = rng.generator() if isinstance(rng, RngStream) else rng
    n_coherent = 1 if coherence == Coherence.PER_FRAME else n_blocks

    if model == ChannelModel.IDENTITY:
        H = np.broadcast_to(np.eye(B, U, dtype=complex), (K, n_coherent, B, U)).copy()
    elif model == ChannelModel.IID_RAYLEIGH:
        H = gaussian_noise((K, n_coherent, B, U), 1.0, gen)
    else:
        if not 1 <= n_taps <= K:
            raise ValueError(f"Tapped-delay-line needs 1 <= taps <= K, got {n_taps}")
        profile = tdl_power_profile(n_taps, decay)
        taps = gaussian_noise((n_taps, n_coherent, B, U), 1.0, gen) * np.sqrt(profile)[:, None, None, None]
        H = scipy.fft.fft(taps, n=K, axis=0)

    logger.debug("Generated %s channel %s, B=%d U=%d K=%d blocks=%d", model.value, coherence.value, B, U, K, n_blocks)
    return ChannelRealization(H=H, model=model, coherence=coherence, n_blocks=n_blocks)


def stack_users(s: Union[Sequence[FdBlocks], np.ndarray]) -> np.ndarray:
    """
    Stack per-user FD blocks into a (U, M', K) array
    """
    if isinstance(s, np.ndarray):
        return s
    shapes = {blocks.blocks.shape for blocks in s}
    if len(shapes) != 1:
        raise ValueError(f"All users must provide the same number of K-length blocks, got shapes {sorted(shapes)}")
    return np.stack([blocks.blocks for blocks in s])


def apply_channel(
    s: Union[Sequence[FdBlocks], np.ndarray],
    channel: ChannelRealization,
    N0: float,
    rng: Union[RngStream, np.random.Generator],
) -> ReceivedFrame:
    S = stack_users(s)
    U, n_blocks, K = S.shape
    if (U, n_blocks, K) != (channel.U, channel.n_blocks, channel.K):
        raise ValueError(
            f"Transmit blocks {S.shape} do not match channel (U={channel.U}, blocks={channel.n_blocks}, K={channel.K})"
        )

    # (K, M', U, 1) against (K, 1|M', B, U)
    x = np.transpose(S, (2, 1, 0))[..., np.newaxis]
    y = (channel.H @ x)[..., 0]
    y = y + gaussian_noise(y.shape, N0, rng)
    return ReceivedFrame(y=y, N0=N0)


def dump_channel_csv(channel: ChannelRealization, path: Union[str, Path]):
    """
    Write every gain as a (k, m, i, j, re, im) row
    """
    H = channel.H
    k, m, i, j = np.meshgrid(*(np.arange(n) for n in H.shape), indexing="ij")
    df = pd.DataFrame(
        {
            "k": k.ravel(),
            "m": m.ravel(),
            "i": i.ravel(),
            "j": j.ravel(),
            "re": H.real.ravel(),
            "im": H.imag.ravel(),
        }
    )
    df.to_csv(path, index=False)
    logger.debug("Dumped %d channel gains to %s", len(df), path)
