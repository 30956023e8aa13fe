import itertools

import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_array_equal

from mimowaveforms.constellation import (
    ConstellationKind,
    hard_decision,
    llr_exact,
    llr_maxlog,
    make_constellation,
    map_bits,
    pam_for_qam,
)

ALPHABETS = [("qam", 4), ("qam", 16), ("qam", 64), ("pam", 2), ("pam", 4), ("pam", 8)]


def brute_force_llr(s, npi, c):
    llr = np.empty(c.bits_per_symbol)
    d = np.abs(s - c.points) ** 2
    for b in range(c.bits_per_symbol):
        ones = c.labels[:, b] == 1
        llr[b] = (d[ones].min() - d[~ones].min()) / npi
    return llr


class TestAlphabets:
    def test_qpsk_points(self, qpsk):
        expected = {complex(i, q) / np.sqrt(2) for i, q in itertools.product((-1, 1), repeat=2)}
        assert {complex(np.round(p, 12)) for p in qpsk.points} == {complex(np.round(p, 12)) for p in expected}

    @pytest.mark.parametrize("kind, order", ALPHABETS)
    def test_unit_average_energy(self, kind, order):
        c = make_constellation(kind, order)
        assert np.mean(np.abs(c.points) ** 2) == pytest.approx(1.0, abs=1e-12)

    def test_pam8_amplitudes(self, pam8):
        assert_allclose(np.sort(pam8.points), np.arange(-7, 8, 2) / np.sqrt(21))
        assert pam8.is_real

    @pytest.mark.parametrize("kind, order", ALPHABETS)
    def test_gray_neighbours_differ_in_one_bit(self, kind, order):
        c = make_constellation(kind, order)
        d = np.abs(c.points[:, None] - c.points[None, :])
        d_min = d[d > 1e-9].min()
        for i, j in zip(*np.nonzero(np.isclose(d, d_min))):
            assert np.sum(c.labels[i] != c.labels[j]) == 1

    def test_pam_for_qam(self):
        c = pam_for_qam(64)
        assert c.kind == ConstellationKind.PAM
        assert c.order == 8

    @pytest.mark.parametrize("kind, order", [("qam", 8), ("qam", 3), ("pam", 1), ("pam", 6)])
    def test_unsupported_orders(self, kind, order):
        with pytest.raises(ValueError):
            make_constellation(kind, order)


class TestMapping:
    def test_labels_select_points(self, qam64):
        bits = qam64.labels[[5, 63, 0]].ravel()
        assert_array_equal(map_bits(bits, qam64), qam64.points[[5, 63, 0]])

    def test_bit_count_not_divisible(self, qam64):
        with pytest.raises(ValueError):
            map_bits(np.zeros(7, dtype=np.uint8), qam64)

    @pytest.mark.parametrize("kind, order", ALPHABETS)
    def test_noiseless_round_trip(self, rng, kind, order):
        c = make_constellation(kind, order)
        bits = rng.integers(0, 2, size=c.bits_per_symbol * 500, dtype=np.uint8)
        points, decided = hard_decision(map_bits(bits, c), c)
        assert_array_equal(decided.ravel(), bits)
        assert_array_equal(points, map_bits(bits, c))

    def test_tie_goes_to_lowest_index(self, qpsk):
        points, bits = hard_decision(np.array([0.0 + 0.0j]), qpsk)
        assert points[0] == qpsk.points[0]
        assert_array_equal(bits[0], qpsk.labels[0])


class TestLlr:
    @pytest.mark.parametrize("kind, order", ALPHABETS)
    def test_sign_on_exact_points(self, kind, order):
        c = make_constellation(kind, order)
        llr = llr_maxlog(c.points, 0.1, c)
        assert_array_equal(llr > 0, c.labels == 0)

    def test_bpsk_antisymmetry(self):
        c = make_constellation("pam", 2)
        s = np.linspace(-2, 2, 21)
        assert_allclose(llr_maxlog(s, 0.5, c), -llr_maxlog(-s, 0.5, c))

    def test_qpsk_brute_force(self, qpsk):
        s = 0.3 + 0.1j
        assert_allclose(llr_maxlog(np.array([s]), 0.2, qpsk)[0], brute_force_llr(s, 0.2, qpsk), rtol=1e-12)

    def test_cloud_brute_force(self, rng, qam64):
        s = rng.standard_normal(50) + 1j * rng.standard_normal(50)
        npi = rng.uniform(0.5, 2.0, 50)
        expected = np.array([brute_force_llr(si, vi, qam64) for si, vi in zip(s, npi)])
        assert_allclose(llr_maxlog(s, npi, qam64, clamp=np.inf), expected, rtol=1e-10)

    def test_sign_independent_of_noise_scale(self, rng, qam64):
        s = rng.standard_normal(40) + 1j * rng.standard_normal(40)
        assert_array_equal(np.sign(llr_maxlog(s, 0.3, qam64)), np.sign(llr_maxlog(s, 3.0, qam64)))

    def test_clamped(self, qam64):
        llr = llr_maxlog(qam64.points, 1e-9, qam64)
        assert np.max(np.abs(llr)) <= 64.0

    def test_non_positive_npi(self, qpsk):
        with pytest.raises(ValueError):
            llr_maxlog(np.zeros(3), 0.0, qpsk)
        with pytest.raises(ValueError):
            llr_maxlog(np.zeros(2), np.array([1.0, -1.0]), qpsk)

    def test_exact_agrees_in_sign_at_high_snr(self, rng, qam64):
        bits = rng.integers(0, 2, size=6 * 200, dtype=np.uint8)
        s = map_bits(bits, qam64) + 0.01 * (rng.standard_normal(200) + 1j * rng.standard_normal(200))
        assert_array_equal(np.sign(llr_exact(s, 0.01, qam64)), np.sign(llr_maxlog(s, 0.01, qam64)))
