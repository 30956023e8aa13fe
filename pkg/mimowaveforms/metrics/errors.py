from __future__ import annotations

from dataclasses import dataclass, fields
from typing import Optional

import numpy as np


@dataclass(frozen=True)
class ErrorCounters:
    """
    Uncoded error tallies. Counters add element-wise, so shards merge in any order.
    """

    symbol_errors: int = 0
    symbols: int = 0
    bit_errors: int = 0
    bits: int = 0
    frame_errors: int = 0
    frames: int = 0

    def __add__(self, other: ErrorCounters) -> ErrorCounters:
        return ErrorCounters(**{f.name: getattr(self, f.name) + getattr(other, f.name) for f in fields(self)})

    @property
    def ser(self) -> float:
        return self.symbol_errors / self.symbols if self.symbols else 0.0

    @property
    def ber(self) -> float:
        return self.bit_errors / self.bits if self.bits else 0.0

    @property
    def fer(self) -> float:
        return self.frame_errors / self.frames if self.frames else 0.0


def accumulate_errors(
    true_bits, decided_bits, bits_per_symbol: int, counters: Optional[ErrorCounters] = None
) -> ErrorCounters:
    """
    Count errors of per-user frames. Bit arrays are (frames, bits) or a single 1-D frame; a
    symbol is wrong when any of its bits is, a frame when any of its bits is.
    """
    true_bits = np.atleast_2d(np.asarray(true_bits, dtype=np.uint8))
    decided_bits = np.atleast_2d(np.asarray(decided_bits, dtype=np.uint8))
    if true_bits.shape != decided_bits.shape:
        raise ValueError(f"Bit streams differ in shape: {true_bits.shape} vs {decided_bits.shape}")
    if true_bits.shape[1] % bits_per_symbol:
        raise ValueError(f"Frame of {true_bits.shape[1]} bits is not a whole number of {bits_per_symbol}-bit symbols")

    wrong = true_bits != decided_bits
    wrong_symbols = wrong.reshape(wrong.shape[0], -1, bits_per_symbol).any(axis=2)
    update = ErrorCounters(
        symbol_errors=int(wrong_symbols.sum()),
        symbols=int(wrong_symbols.size),
        bit_errors=int(wrong.sum()),
        bits=int(wrong.size),
        frame_errors=int(wrong.any(axis=1).sum()),
        frames=int(wrong.shape[0]),
    )
    return update if counters is None else counters + update
