"""
Core numerics shared by every waveform: unitary DFTs of arbitrary length, circular
convolution, Hermitian positive-definite solves and reproducible Gaussian streams.

All transforms use the unitary convention F_N F_N^H = I_N. scipy.fft handles any length
(mixed-radix with a Bluestein fallback for large prime factors).
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from enum import IntEnum
from typing import Tuple

import numpy as np
import scipy.fft
import scipy.linalg

from .exceptions import SingularMatrixError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class RngStream:
    """
    Counter-based random stream. Identical (master_seed, stream_key) pairs reproduce identical
    sample sequences regardless of which process draws them.
    """

    master_seed: int
    stream_key: Tuple[int, ...] = field(default=())

    def generator(self) -> np.random.Generator:
        seq = np.random.SeedSequence(entropy=self.master_seed, spawn_key=tuple(self.stream_key))
        return np.random.Generator(np.random.Philox(seq))

    def child(self, *key: int) -> RngStream:
        return RngStream(self.master_seed, tuple(self.stream_key) + tuple(key))


def _check_length(v: np.ndarray, n: int, axis: int):
    if n < 1:
        raise ValueError(f"Transform length must be >= 1, got {n}")
    if v.shape[axis] != n:
        raise ValueError(f"Length mismatch: expected {n} samples along axis {axis}, got {v.shape[axis]}")


def dft(v, n: int, axis: int = -1) -> np.ndarray:
    """
    Unitary forward DFT of length n along axis
    """
    v = np.asarray(v)
    _check_length(v, n, axis)
    return scipy.fft.fft(v, n=n, axis=axis, norm="ortho")


def idft(v, n: int, axis: int = -1) -> np.ndarray:
    """
    Unitary inverse DFT of length n along axis
    """
    v = np.asarray(v)
    _check_length(v, n, axis)
    return scipy.fft.ifft(v, n=n, axis=axis, norm="ortho")


def circ_conv(a, b, axis: int = -1) -> np.ndarray:
    """
    Circular convolution out[j] = sum_l a[l] * b[(j - l) mod n], computed through unnormalized
    spectra so no sqrt(n) factor needs compensating. Inputs broadcast against each other.
    """
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape[axis] != b.shape[axis]:
        raise ValueError(f"Length mismatch in circular convolution: {a.shape[axis]} != {b.shape[axis]}")
    out = scipy.fft.ifft(scipy.fft.fft(a, axis=axis) * scipy.fft.fft(b, axis=axis), axis=axis)
    if np.isrealobj(a) and np.isrealobj(b):
        return out.real
    return out


def _substitute(T: np.ndarray, rhs: np.ndarray, lower: bool) -> np.ndarray:
    """
    Batched triangular solve T x = rhs, one row of the stack at a time
    """
    n = T.shape[-1]
    shape = np.broadcast_shapes(T.shape[:-2], rhs.shape[:-2]) + rhs.shape[-2:]
    x = np.zeros(shape, dtype=np.result_type(T, rhs))
    for i in (range(n) if lower else range(n - 1, -1, -1)):
        known = slice(0, i) if lower else slice(i + 1, n)
        partial = (T[..., i : i + 1, known] @ x[..., known, :])[..., 0, :]
        x[..., i, :] = (rhs[..., i, :] - partial) / T[..., i, i, np.newaxis]
    return x


def hermitian_solve(A, b) -> np.ndarray:
    """
    Solve A x = b for Hermitian positive-definite A.

    A may be a single (U, U) matrix or a stack (..., U, U). b is either a vector (..., U) or a
    block of right-hand sides (..., U, R); the Cholesky factor is computed once and reused for
    every column.
    """
    A = np.asarray(A)
    b = np.asarray(b)
    if A.shape[-1] != A.shape[-2]:
        raise ValueError(f"Matrix must be square, got shape {A.shape}")
    vector_rhs = b.ndim == A.ndim - 1
    if b.shape[-1 if vector_rhs else -2] != A.shape[-1]:
        raise ValueError(f"Right-hand side of shape {b.shape} does not match matrix of shape {A.shape}")

    if A.ndim == 2:
        try:
            factor = scipy.linalg.cho_factor(A, lower=True, check_finite=True)
        except np.linalg.LinAlgError as e:
            raise SingularMatrixError(f"Non-positive pivot in Cholesky factorization: {e}") from e
        return scipy.linalg.cho_solve(factor, b)

    try:
        L = np.linalg.cholesky(A)
    except np.linalg.LinAlgError as e:
        raise SingularMatrixError(f"Non-positive pivot in batched Cholesky factorization: {e}") from e

    rhs = b[..., np.newaxis] if vector_rhs else b
    z = _substitute(L, rhs, lower=True)
    x = _substitute(np.conj(np.swapaxes(L, -1, -2)), z, lower=False)
    return x[..., 0] if vector_rhs else x


def gaussian_noise(shape, variance: float, rng: RngStream | np.random.Generator) -> np.ndarray:
    """
    Circularly symmetric complex Gaussian samples with total variance `variance`
    (variance / 2 per real component)
    """
    if variance < 0:
        raise ValueError(f"Noise variance must be non-negative, got {variance}")
    gen = rng.generator() if isinstance(rng, RngStream) else rng
    shape = (shape,) if np.isscalar(shape) else tuple(shape)
    samples = gen.standard_normal(shape + (2,))
    noise = (samples[..., 0] + 1j * samples[..., 1]) * np.sqrt(variance / 2)
    return noise


class StreamPurpose(IntEnum):
    BITS = 0
    CHANNEL = 1
    NOISE = 2
    PAPR = 3
    PSD = 4


def snr_key(snr_db: float) -> int:
    """
    Non-negative stream key component for an SNR value, resolved to 0.001 dB
    """
    return int(round(snr_db * 1000)) + 1_000_000
