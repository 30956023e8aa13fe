from __future__ import annotations

import logging
from functools import lru_cache

import numpy as np

from ..channel import apply_channel, generate_channel
from ..constellation import llr_maxlog
from ..equalizer import mmse_equalize
from ..metrics.errors import ErrorCounters, accumulate_errors
from ..numerics import RngStream, StreamPurpose, snr_key
from ..pipeline import SimConfig
from ..waveforms import Transceiver, make_transceiver

logger = logging.getLogger(__name__)


@lru_cache(maxsize=16)
def transceiver_for(config: SimConfig, waveform: str, K_active=None) -> Transceiver:
    return make_transceiver(
        waveform,
        config.K,
        config.M,
        modulation_order=config.modulation_order,
        K_active=K_active,
        pulse=config.pulse,
        rolloff=config.rolloff,
        M_pam=config.pam_subsymbols,
        gfdm_npi_calibration=config.gfdm_npi_calibration,
    )


def point_stream(config: SimConfig, B: int, U: int, snr_db: float) -> RngStream:
    """
    Stream root of one experiment point, keyed by its values so any sweep order reproduces it
    """
    return RngStream(config.master_seed, (B, U, snr_key(snr_db)))


def run_link_trial(config: SimConfig, tx: Transceiver, B: int, U: int, snr_db: float, trial: int):
    """
    One frame per user through bits, modulation, channel, MMSE equalization, demodulation,
    NPI, LLR and hard decision. Bits are decided on the LLR sign (negative means 1). Returns
    (true bits, decided bits, LLRs), each with one row per user.
    """
    stream = point_stream(config, B, U, snr_db).child(trial)
    N0 = 10 ** (-snr_db / 10)

    frames = [tx.random_frame(stream.child(StreamPurpose.BITS, u).generator()) for u in range(U)]
    channel = generate_channel(
        B, U, config.K, tx.n_blocks, config.channel_model, config.coherence,
        stream.child(StreamPurpose.CHANNEL), n_taps=config.tdl_taps,
    )
    rx = apply_channel([tx.modulate(f) for f in frames], channel, N0, stream.child(StreamPurpose.NOISE))
    eq = mmse_equalize(rx, channel)

    c = tx.constellation
    true_bits, decided_bits, llrs = [], [], []
    for u, frame in enumerate(frames):
        grid, npi = tx.demodulate(eq, u)
        symbols = grid[:, tx.active]
        npi = np.broadcast_to(npi, grid.shape)[:, tx.active]
        llr = llr_maxlog(symbols, npi, c, clamp=config.llr_clamp).reshape(-1)
        true_bits.append(frame.source_bits)
        decided_bits.append((llr < 0).astype(np.uint8))
        llrs.append(llr)

    return np.array(true_bits), np.array(decided_bits), np.array(llrs)


def run_link_shard(
    config: SimConfig,
    waveform: str,
    point_index: int,
    B: int,
    U: int,
    snr_db: float,
    trial_start: int,
    trial_stop: int,
):
    """
    Lithops callee function
    Runs trials [trial_start, trial_stop) of one (waveform, point) pair and returns its counters.
    LLRs of the first trial are returned when the configuration asks for them.
    """
    tx = transceiver_for(config, waveform)
    counters = ErrorCounters()
    llr_rows = []

    for trial in range(trial_start, trial_stop):
        keep = config.dump_llr and trial == 0
        true_bits, decided_bits, llrs = run_link_trial(config, tx, B, U, snr_db, trial)
        counters = accumulate_errors(true_bits, decided_bits, tx.constellation.bits_per_symbol, counters)
        if keep:
            for user, user_llrs in enumerate(llrs):
                llr_rows.extend(
                    {"waveform": waveform, "snr_db": snr_db, "B": B, "U": U, "user": user, "bit": i, "llr": v}
                    for i, v in enumerate(user_llrs)
                )

    logger.debug(
        "%s point %d trials [%d, %d): %d/%d bit errors",
        waveform, point_index, trial_start, trial_stop, counters.bit_errors, counters.bits,
    )
    return {"waveform": waveform, "point_index": point_index, "counters": counters, "llr_rows": llr_rows}
