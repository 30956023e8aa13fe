import numpy as np
import pytest

from mimowaveforms.constellation import ConstellationKind, make_constellation


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def qpsk():
    return make_constellation(ConstellationKind.QAM, 4)


@pytest.fixture
def qam64():
    return make_constellation(ConstellationKind.QAM, 64)


@pytest.fixture
def pam8():
    return make_constellation(ConstellationKind.PAM, 8)


@pytest.fixture
def small_params(tmp_path):
    """
    A fast configuration for end-to-end runs
    """
    return {
        "K": 16,
        "M": 4,
        "B": 8,
        "U": 2,
        "modulation_order": 4,
        "snr_db": [10.0],
        "trials": 6,
        "shard_trials": 4,
        "papr_frames": 20,
        "psd_frames": 20,
        "psd_segment": 64,
        "antennas": [8, 16],
        "gfdm_npi_calibration": "analytic",
        "output_dir": str(tmp_path / "out"),
        "debug": True,
    }


def naive_dft(v):
    n = len(v)
    idx = np.arange(n)
    return np.exp(-2j * np.pi * np.outer(idx, idx) / n) @ v / np.sqrt(n)


def naive_idft(v):
    n = len(v)
    idx = np.arange(n)
    return np.exp(2j * np.pi * np.outer(idx, idx) / n) @ v / np.sqrt(n)


def naive_circ_conv(a, b):
    n = len(a)
    return np.array([sum(a[l] * b[(j - l) % n] for l in range(n)) for j in range(n)])
