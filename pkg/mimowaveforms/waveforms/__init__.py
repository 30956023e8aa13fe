from __future__ import annotations

import logging
from enum import Enum
from typing import Optional, Tuple, Union

import numpy as np

from ..constellation import Constellation, ConstellationKind, make_constellation, pam_for_qam
from ..equalizer import EqualizedFrame, aggregate_td_npi
from . import fbmc, gfdm, linear
from .grid import FdBlocks, FrameGrid, active_subcarriers, blocks_to_time, random_frame, time_to_blocks

logger = logging.getLogger(__name__)


class WaveformKind(Enum):
    OFDM = "ofdm"
    SCFDMA = "scfdma"
    GFDM = "gfdm"
    FBMC = "fbmc"


class Transceiver:
    """
    One waveform's transmit and receive chain for a single user frame. Subclasses define how a
    FrameGrid becomes FD blocks for the channel, how equalized blocks become symbol estimates
    with their NPI variances, and which time-domain segments are periodic for PAPR oversampling.
    """

    kind: WaveformKind

    def __init__(self, K: int, M: int, constellation: Constellation, K_active: Optional[int] = None):
        self.K = K
        self.M = M
        self.constellation = constellation
        self.K_active = K if K_active is None else K_active
        self.active = active_subcarriers(K, self.K_active)

    @property
    def frame_rows(self) -> int:
        """
        Rows of the FrameGrid (blocks or subsymbols)
        """
        return self.M

    @property
    def n_blocks(self) -> int:
        """
        FD blocks M' occupied on the channel
        """
        return self.M

    def random_frame(self, rng: np.random.Generator) -> FrameGrid:
        return random_frame(self.K, self.frame_rows, self.constellation, rng, self.K_active)

    def modulate(self, g: FrameGrid) -> FdBlocks:
        return time_to_blocks(self.time_signal(g), self.K)

    def time_signal(self, g: FrameGrid) -> np.ndarray:
        raise NotImplementedError()

    def demodulate(self, eq: EqualizedFrame, user: int = 0) -> Tuple[np.ndarray, np.ndarray]:
        """
        Symbol estimates on the FrameGrid layout and the NPI variance the demapper should use,
        broadcastable against the estimates
        """
        raise NotImplementedError()

    def papr_segments(self, x: np.ndarray) -> np.ndarray:
        """
        Rows of x that are individually periodic, oversampled one at a time
        """
        return x[np.newaxis, :]

    def __repr__(self):
        return f"{self.__class__.__name__}(K={self.K}, M={self.M}, order={self.constellation.order})"


class OfdmTransceiver(Transceiver):
    kind = WaveformKind.OFDM

    def modulate(self, g: FrameGrid) -> FdBlocks:
        return linear.ofdm_modulate(g)

    def time_signal(self, g: FrameGrid) -> np.ndarray:
        return linear.ofdm_time_signal(g)

    def demodulate(self, eq: EqualizedFrame, user: int = 0):
        return linear.ofdm_demodulate(eq, user)

    def papr_segments(self, x: np.ndarray) -> np.ndarray:
        return x.reshape(-1, self.K)


class ScFdmaTransceiver(OfdmTransceiver):
    kind = WaveformKind.SCFDMA

    def modulate(self, g: FrameGrid) -> FdBlocks:
        return linear.scfdma_modulate(g, self.K_active)

    def time_signal(self, g: FrameGrid) -> np.ndarray:
        return linear.scfdma_time_signal(g, self.K_active)

    def demodulate(self, eq: EqualizedFrame, user: int = 0):
        return linear.scfdma_demodulate(eq, user, self.K_active)


class GfdmTransceiver(Transceiver):
    kind = WaveformKind.GFDM

    def __init__(
        self,
        K: int,
        M: int,
        constellation: Constellation,
        prototype: gfdm.GfdmPrototype,
        npi_constants: gfdm.GfdmNpiConstants,
        K_active: Optional[int] = None,
    ):
        super().__init__(K, M, constellation, K_active)
        self.prototype = prototype
        self.npi_constants = npi_constants

    def time_signal(self, g: FrameGrid) -> np.ndarray:
        return gfdm.gfdm_modulate(g, self.prototype)

    def demodulate(self, eq: EqualizedFrame, user: int = 0):
        x_hat = blocks_to_time(eq.s_hat[user])
        symbols = gfdm.gfdm_zf_demodulate(x_hat, self.prototype)
        v2 = aggregate_td_npi(eq.npi_fd[user], self.active)
        npi = np.full(symbols.shape, gfdm.gfdm_npi(v2, self.npi_constants))
        return symbols, npi


class FbmcTransceiver(Transceiver):
    """
    FBMC carries real PAM subsymbols: M_pam rows of the FrameGrid, with the frame spread over
    ceil(N_td / K) channel blocks
    """

    kind = WaveformKind.FBMC

    def __init__(
        self,
        K: int,
        M: int,
        constellation: Constellation,
        prototype: fbmc.PhydyasPrototype,
        M_pam: int,
        K_active: Optional[int] = None,
    ):
        if not constellation.is_real:
            raise ValueError("FBMC requires a PAM constellation")
        super().__init__(K, M, constellation, K_active)
        self.prototype = prototype
        self.M_pam = M_pam
        self.npi_constants = fbmc.fbmc_npi_constants(prototype, M_pam)

    @property
    def frame_rows(self) -> int:
        return self.M_pam

    @property
    def n_blocks(self) -> int:
        return fbmc.block_count(self.K, self.M_pam)

    def time_signal(self, g: FrameGrid) -> np.ndarray:
        return fbmc.fbmc_modulate(g, self.prototype)

    def demodulate(self, eq: EqualizedFrame, user: int = 0):
        x_hat = blocks_to_time(eq.s_hat[user])
        symbols = fbmc.fbmc_demodulate(x_hat, self.prototype, self.M_pam)
        v2 = aggregate_td_npi(eq.npi_fd[user], self.active)
        npi = fbmc.real_part_npi(fbmc.fbmc_npi(v2, self.npi_constants))
        return symbols, np.broadcast_to(npi[:, np.newaxis], symbols.shape)

    def papr_segments(self, x: np.ndarray) -> np.ndarray:
        return fbmc.steady_state(x, self.K)[np.newaxis, :]


def make_transceiver(
    kind: Union[WaveformKind, str],
    K: int,
    M: int,
    modulation_order: int = 64,
    K_active: Optional[int] = None,
    pulse: str = "rrc",
    rolloff: float = 0.25,
    M_pam: Optional[int] = None,
    gfdm_npi_calibration: str = "monte-carlo",
) -> Transceiver:
    """
    Build a transceiver. modulation_order is the QAM order of the complex waveforms; FBMC uses
    the PAM alphabet carrying half as many bits per real subsymbol.
    """
    kind = WaveformKind(kind)
    if kind == WaveformKind.FBMC:
        M_pam = 2 * M if M_pam is None else M_pam
        return FbmcTransceiver(K, M, pam_for_qam(modulation_order), fbmc.phydyas_prototype(K), M_pam, K_active)

    qam = make_constellation(ConstellationKind.QAM, modulation_order)
    if kind == WaveformKind.OFDM:
        return OfdmTransceiver(K, M, qam, K_active)
    if kind == WaveformKind.SCFDMA:
        return ScFdmaTransceiver(K, M, qam, K_active)

    prototype = gfdm.make_prototype(K, M, pulse, rolloff)
    consts = gfdm.gfdm_npi_constants(prototype, gfdm_npi_calibration)
    return GfdmTransceiver(K, M, qam, prototype, consts, K_active)
