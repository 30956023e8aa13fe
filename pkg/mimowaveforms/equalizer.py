"""
Linear FD-MMSE multi-user detection with unbiased outputs and post-equalization NPI.

Per cell (k, m): G = H^H H, A = G + N0 I, raw = A^-1 H^H y. With mu_u = (A^-1 G)_uu =
1 - N0 (A^-1)_uu the unbiased estimate is raw_u / mu_u, with error variance
(1 - mu_u) / mu_u = N0 (A^-1)_uu / mu_u for unit-power transmit samples.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .exceptions import RankDeficiencyError, SingularMatrixError
from .numerics import hermitian_solve

logger = logging.getLogger(__name__)

RANK_TOLERANCE = 1e-12
# Lower bound on the reported NPI; zero forcing of a noiseless frame would otherwise report 0
NPI_FLOOR = 1e-200


@dataclass(frozen=True, eq=False)
class EqualizedFrame:
    # Unbiased FD estimates, shape (U, M', K)
    s_hat: np.ndarray
    # Post-equalization error variance per user, block and subcarrier, shape (U, M', K)
    npi_fd: np.ndarray

    @property
    def U(self) -> int:
        return self.s_hat.shape[0]

    @property
    def npi_td(self) -> np.ndarray:
        """
        Aggregated TD NPI variance v^2 per user
        """
        return aggregate_td_npi(self.npi_fd)


def _first_singular_cell(A: np.ndarray):
    eig = np.linalg.eigvalsh(A)
    singular = eig[..., 0] <= RANK_TOLERANCE * np.maximum(eig[..., -1], 1.0)
    cells = np.argwhere(singular)
    return tuple(int(c) for c in cells[0]) if cells.size else None


def mmse_equalize(rx, channel, N0: Optional[float] = None) -> EqualizedFrame:
    """
    Equalize a ReceivedFrame with the genie noise variance N0 (defaults to the frame's own).
    N0 = 0 degrades to zero forcing and requires a full-rank Gram matrix in every cell.
    """
    N0 = rx.N0 if N0 is None else N0
    if N0 < 0:
        raise ValueError(f"Noise variance must be non-negative, got {N0}")

    H = channel.H
    U = H.shape[-1]
    Hh = np.conj(np.swapaxes(H, -1, -2))
    A = Hh @ H + N0 * np.eye(U)

    # One Cholesky factor per coherence cell, shared by every block the cell covers
    try:
        A_inv = hermitian_solve(A, np.broadcast_to(np.eye(U, dtype=complex), A.shape))
    except SingularMatrixError as e:
        cell = _first_singular_cell(A)
        raise RankDeficiencyError(f"Gram matrix is singular at (k, m) = {cell} with N0 = {N0}", cell=cell) from e

    if N0 == 0:
        cell = _first_singular_cell(A)
        if cell is not None:
            raise RankDeficiencyError(f"Gram matrix is rank deficient at (k, m) = {cell}", cell=cell)

    mf = Hh @ rx.y[..., np.newaxis]
    raw = (A_inv @ mf)[..., 0]

    noise_share = N0 * np.real(np.diagonal(A_inv, axis1=-2, axis2=-1))
    mu = 1.0 - noise_share
    npi = np.maximum(noise_share / mu, NPI_FLOOR)

    s_hat = np.transpose(raw / mu, (2, 1, 0))
    npi_fd = np.broadcast_to(np.transpose(npi, (2, 1, 0)), s_hat.shape).copy()
    logger.debug("Equalized %d users over %s cells, mean NPI %.4g", U, A.shape[:2], npi_fd.mean())
    return EqualizedFrame(s_hat=s_hat, npi_fd=npi_fd)


def aggregate_td_npi(npi_fd: np.ndarray, active: Optional[np.ndarray] = None, per_block: bool = False) -> np.ndarray:
    """
    TD NPI variance: mean of the per-subcarrier NPI over the (active) subcarriers of each block.
    Returns per-(user, block) values when per_block is set, per-user v^2 otherwise.
    """
    npi_fd = np.asarray(npi_fd, dtype=float)
    if active is not None:
        npi_fd = npi_fd[..., active]
    per_block_npi = npi_fd.mean(axis=-1)
    if per_block:
        return per_block_npi
    return per_block_npi.mean(axis=-1)
