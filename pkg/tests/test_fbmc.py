import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_array_equal

from mimowaveforms.numerics import RngStream, gaussian_noise
from mimowaveforms.waveforms.fbmc import (
    OVERLAP,
    PHYDYAS_COEFFICIENTS,
    band_offsets,
    block_count,
    build_p_diag,
    build_p_matrix,
    fbmc_demodulate,
    fbmc_demodulate_statistic,
    fbmc_modulate,
    fbmc_npi,
    fbmc_npi_constants,
    frame_length,
    phase_table,
    phydyas_prototype,
    real_part_npi,
    steady_state,
)
from mimowaveforms.waveforms.grid import FrameGrid, random_frame


def grid(symbols):
    return FrameGrid(symbols=np.asarray(symbols), source_bits=np.zeros(0, dtype=np.uint8))


def synthesis_oracle(d, p):
    """
    Double sum over subsymbols and subcarriers, evaluated sample by sample
    """
    M_pam, K = d.shape
    L = p.L
    beta = phase_table(M_pam, K)
    x = np.zeros(frame_length(K, M_pam), dtype=complex)
    for n in range(x.size):
        for m in range(M_pam):
            t = n - m * K // 2
            if 0 <= t < L:
                x[n] += np.sum(d[m] * beta[m] * p.p[t] * np.exp(2j * np.pi * np.arange(K) * n / K))
    return x / np.sqrt(2)


class TestPrototype:
    def test_symmetric_unit_energy(self):
        p = phydyas_prototype(16)
        assert p.L == OVERLAP * 16
        assert_allclose(p.p, p.p[::-1], atol=1e-14)
        assert np.sum(p.p**2) == pytest.approx(1.0)

    def test_nyquist_coefficients(self):
        H1, H2, H3 = PHYDYAS_COEFFICIENTS
        assert H1**2 + H3**2 == pytest.approx(1.0, abs=1e-5)
        assert 2 * H2**2 == pytest.approx(1.0)

    @pytest.mark.parametrize("K", [2, 7, 15])
    def test_invalid_subcarrier_counts(self, K):
        with pytest.raises(ValueError):
            phydyas_prototype(K)

    def test_frame_geometry(self):
        assert frame_length(64, 28) == 1120
        assert block_count(64, 28) == 18
        assert block_count(16, 4) == 6


class TestModulation:
    def test_single_symbol_emits_the_prototype(self):
        p = phydyas_prototype(8)
        d = np.zeros((4, 8))
        d[0, 0] = 1
        x = fbmc_modulate(grid(d), p)
        assert_allclose(x[: p.L], p.p / np.sqrt(2), atol=1e-14)
        assert_allclose(x[p.L :], 0, atol=1e-14)

    def test_double_sum_oracle(self, rng, pam8):
        p = phydyas_prototype(8)
        g = random_frame(8, 6, pam8, rng)
        assert_allclose(fbmc_modulate(g, p), synthesis_oracle(g.symbols, p), atol=1e-10)

    def test_zero_grid(self):
        p = phydyas_prototype(8)
        assert_array_equal(fbmc_modulate(grid(np.zeros((3, 8))), p), 0)

    def test_linear(self, rng, pam8):
        p = phydyas_prototype(16)
        a, b = random_frame(16, 5, pam8, rng), random_frame(16, 5, pam8, rng)
        combined = fbmc_modulate(grid(2 * a.symbols - 0.5 * b.symbols), p)
        assert_allclose(combined, 2 * fbmc_modulate(a, p) - 0.5 * fbmc_modulate(b, p), atol=1e-12)

    def test_subsymbol_energy_is_constant_across_m(self, rng, pam8):
        p = phydyas_prototype(16)
        row = random_frame(16, 1, pam8, rng).symbols[0]
        energies = []
        for m in range(10):
            d = np.zeros((10, 16))
            d[m] = row
            energies.append(np.sum(np.abs(fbmc_modulate(grid(d), p)) ** 2))
        assert_allclose(energies, energies[0], rtol=1e-10)

    def test_interior_hop_energy(self, rng, pam8):
        """
        Every K/2 hop of the steady state carries K E[d^2] / 2 on average
        """
        K, M_pam = 16, 20
        p = phydyas_prototype(K)
        bursts = np.array([fbmc_modulate(random_frame(K, M_pam, pam8, rng), p) for _ in range(400)])
        power = np.mean(np.abs(bursts) ** 2, axis=0)
        hops = steady_state(power, K).reshape(-1, K // 2).sum(axis=1)
        assert hops.size == M_pam - 7
        assert_allclose(hops, K * np.mean(pam8.points**2) / 2, rtol=0.1)

    def test_complex_symbols_rejected(self):
        with pytest.raises(ValueError):
            fbmc_modulate(grid(np.full((2, 8), 1 + 1j)), phydyas_prototype(8))

    def test_subcarrier_mismatch(self):
        with pytest.raises(ValueError):
            fbmc_modulate(grid(np.zeros((2, 8))), phydyas_prototype(16))


class TestDemodulation:
    @pytest.mark.parametrize("K", [16, 32, 64])
    def test_loopback_interference_is_negligible(self, rng, pam8, K):
        p = phydyas_prototype(K)
        g = random_frame(K, 10, pam8, rng)
        d_hat = fbmc_demodulate(fbmc_modulate(g, p), p, 10)
        sir_db = 10 * np.log10(np.mean(g.symbols**2) / np.mean((d_hat - g.symbols) ** 2))
        assert sir_db >= 50

    def test_imaginary_part_carries_intrinsic_interference(self, rng, pam8):
        p = phydyas_prototype(16)
        g = random_frame(16, 6, pam8, rng)
        z = fbmc_demodulate_statistic(fbmc_modulate(g, p), p, 6)
        assert np.max(np.abs(z.imag)) > 1e-3

    def test_zero_input(self):
        p = phydyas_prototype(8)
        assert_array_equal(fbmc_demodulate(np.zeros(frame_length(8, 4), dtype=complex), p, 4), 0)

    def test_batched_and_padded_input(self, rng, pam8):
        p = phydyas_prototype(8)
        g = random_frame(8, 4, pam8, rng)
        x = fbmc_modulate(g, p)
        padded = np.stack([np.r_[x, np.zeros(5)]] * 2)
        out = fbmc_demodulate(padded, p, 4)
        assert out.shape == (2, 4, 8)
        assert_allclose(out[1], fbmc_demodulate(x, p, 4))

    def test_short_input(self):
        p = phydyas_prototype(8)
        with pytest.raises(ValueError):
            fbmc_demodulate(np.zeros(frame_length(8, 4) - 1), p, 4)

    def test_sparse_network_matches_the_receiver(self, rng):
        """
        P x followed by a unitary DFT per subsymbol reproduces the folded receiver statistic
        """
        K, M_pam = 8, 4
        p = phydyas_prototype(K)
        x = rng.standard_normal(frame_length(K, M_pam)) + 1j * rng.standard_normal(frame_length(K, M_pam))
        folded = (build_p_matrix(p, M_pam) @ x).reshape(M_pam, K)
        via_matrix = np.fft.fft(folded, axis=1, norm="ortho")
        windows = x[np.arange(M_pam)[:, None] * (K // 2) + np.arange(p.L)] * p.p
        direct = np.fft.fft(windows.reshape(M_pam, OVERLAP, K).sum(axis=1), axis=1) * np.sqrt(2)
        assert_allclose(via_matrix, direct, atol=1e-12)


class TestNpi:
    def test_diagonal_matches_sparse_product(self):
        p = phydyas_prototype(16)
        P = build_p_matrix(p, 6)
        assert_allclose(build_p_diag(p, 6), (P @ P.conj().T).diagonal(), rtol=1e-12)

    def test_diagonal_matches_dense_product(self):
        p = phydyas_prototype(8)
        P = build_p_matrix(p, 4).toarray()
        assert_allclose(build_p_diag(p, 4), np.diag(P @ P.conj().T), rtol=1e-12)

    def test_band_offsets_are_half_block_multiples(self):
        p = phydyas_prototype(16)
        P = build_p_matrix(p, 6)
        offsets = band_offsets(P @ P.conj().T)
        assert 0 in offsets
        assert np.all(offsets % 8 == 0)

    def test_subsymbol_mean_is_two(self):
        consts = fbmc_npi_constants(phydyas_prototype(32), 10)
        assert_allclose(consts.subsymbol_means, 2.0)
        assert_allclose(fbmc_npi(0.5, consts), np.full(10, 1.0))
        assert_allclose(real_part_npi(fbmc_npi(0.5, consts)), 0.5)

    def test_per_user_variance(self):
        consts = fbmc_npi_constants(phydyas_prototype(8), 4)
        assert fbmc_npi(np.array([1.0, 3.0]), consts).shape == (2, 4)
        with pytest.raises(ValueError):
            fbmc_npi(0.0, consts)

    def test_real_part_noise(self):
        """
        White noise of unit variance leaves half the complex statistic's NPI in the real part
        """
        K, M_pam = 16, 6
        p = phydyas_prototype(K)
        noise = gaussian_noise((1100, frame_length(K, M_pam)), 1.0, RngStream(31))
        measured = np.var(fbmc_demodulate(noise, p, M_pam))
        predicted = real_part_npi(fbmc_npi(1.0, fbmc_npi_constants(p, M_pam))).mean()
        assert measured == pytest.approx(predicted, rel=0.05)


class TestSteadyState:
    def test_trims_the_ramps(self):
        K = 16
        x = np.arange(frame_length(K, 28))
        interior = steady_state(x, K)
        ramp = OVERLAP * K - K // 2
        assert interior.size == x.size - 2 * ramp
        assert interior[0] == ramp

    def test_short_burst(self):
        with pytest.raises(ValueError):
            steady_state(np.zeros(frame_length(16, 2)), 16)
