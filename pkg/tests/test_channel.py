import numpy as np
import pandas as pd
import pytest
from numpy.testing import assert_allclose, assert_array_equal

from mimowaveforms.channel import (
    ChannelModel,
    ChannelRealization,
    Coherence,
    apply_channel,
    dump_channel_csv,
    generate_channel,
    tdl_power_profile,
)
from mimowaveforms.numerics import RngStream
from mimowaveforms.waveforms.grid import FdBlocks


def fixed_channel(H, n_blocks=1):
    return ChannelRealization(H=H, model=ChannelModel.IID_RAYLEIGH, coherence=Coherence.PER_FRAME, n_blocks=n_blocks)


class TestGeneration:
    def test_rayleigh_unit_power(self):
        channel = generate_channel(128, 128, 64, 1, "iid-rayleigh", "per-frame", RngStream(5))
        assert np.mean(np.abs(channel.H) ** 2) == pytest.approx(1.0, rel=0.01)

    def test_per_frame_broadcasts_over_blocks(self):
        channel = generate_channel(4, 2, 8, 6, "iid-rayleigh", "per-frame", RngStream(5))
        assert channel.H.shape == (8, 1, 4, 2)
        expanded = channel.expanded()
        assert expanded.shape == (8, 6, 4, 2)
        assert_array_equal(expanded[:, 0], expanded[:, 5])

    def test_per_block_draws_each_block(self):
        channel = generate_channel(4, 2, 8, 6, "iid-rayleigh", "per-block", RngStream(5))
        assert channel.H.shape == (8, 6, 4, 2)
        assert not np.allclose(channel.H[:, 0], channel.H[:, 1])

    def test_single_tap_is_flat(self):
        channel = generate_channel(4, 2, 16, 1, "tapped-delay-line", "per-frame", RngStream(2), n_taps=1)
        assert_allclose(channel.H, np.broadcast_to(channel.H[:1], channel.H.shape))

    def test_tapped_delay_line_unit_power(self):
        channel = generate_channel(128, 64, 64, 1, "tapped-delay-line", "per-frame", RngStream(3))
        assert np.mean(np.abs(channel.H) ** 2) == pytest.approx(1.0, rel=0.05)

    def test_power_profile(self):
        profile = tdl_power_profile(4)
        assert profile.sum() == pytest.approx(1.0)
        assert np.all(np.diff(profile) < 0)

    def test_identity_model(self):
        channel = generate_channel(3, 2, 4, 1, "identity", "per-frame", RngStream(0))
        assert_array_equal(channel.H[2, 0], np.eye(3, 2))

    @pytest.mark.parametrize("B, U, K", [(2, 4, 8), (4, 0, 8), (4, 2, 0)])
    def test_invalid_dimensions(self, B, U, K):
        with pytest.raises(ValueError):
            generate_channel(B, U, K, 1, "iid-rayleigh", "per-frame", RngStream(0))

    def test_reproducible(self):
        a = generate_channel(8, 4, 16, 2, "iid-rayleigh", "per-block", RngStream(11, (1, 2)))
        b = generate_channel(8, 4, 16, 2, "iid-rayleigh", "per-block", RngStream(11, (1, 2)))
        assert_array_equal(a.H, b.H)

    def test_favourable_propagation(self):
        """
        Off-diagonal Gram entries shrink towards zero as antennas outnumber users
        """
        channel = generate_channel(128, 8, 64, 1, "iid-rayleigh", "per-frame", RngStream(4))
        H = channel.H[:, 0]
        gram = np.conj(np.swapaxes(H, -1, -2)) @ H / 128
        off_diagonal = gram[:, ~np.eye(8, dtype=bool)]
        assert np.mean(np.abs(off_diagonal)) < 0.1


class TestApplication:
    def test_scalar_identity_without_noise(self, rng):
        s = rng.standard_normal((1, 1, 4)) + 1j * rng.standard_normal((1, 1, 4))
        rx = apply_channel(s, fixed_channel(np.ones((4, 1, 1, 1), dtype=complex)), 0.0, RngStream(0))
        assert_allclose(rx.y[:, 0, 0], s[0, 0])

    def test_two_by_two_hand_example(self):
        H = np.array([[1, 2j], [0.5, -1]])[np.newaxis, np.newaxis]
        s = np.array([1, 1j]).reshape(2, 1, 1)
        rx = apply_channel(s, fixed_channel(H), 0.0, RngStream(0))
        assert_allclose(rx.y[0, 0], [-1, 0.5 - 1j])

    def test_noise_variance(self):
        channel = generate_channel(128, 1, 64, 128, "iid-rayleigh", "per-frame", RngStream(1))
        rx = apply_channel(np.zeros((1, 128, 64), dtype=complex), channel, 0.5, RngStream(2))
        assert np.mean(np.abs(rx.y) ** 2) == pytest.approx(0.5, rel=0.01)

    def test_linear_without_noise(self, rng):
        channel = generate_channel(4, 2, 8, 3, "iid-rayleigh", "per-block", RngStream(1))
        s1 = rng.standard_normal((2, 3, 8)) + 0j
        s2 = 1j * rng.standard_normal((2, 3, 8))
        y1 = apply_channel(s1, channel, 0.0, RngStream(0)).y
        y2 = apply_channel(s2, channel, 0.0, RngStream(0)).y
        y = apply_channel(2 * s1 - 3 * s2, channel, 0.0, RngStream(0)).y
        assert_allclose(y, 2 * y1 - 3 * y2, atol=1e-12)

    def test_accepts_per_user_blocks(self, rng):
        channel = generate_channel(4, 2, 8, 3, "iid-rayleigh", "per-frame", RngStream(1))
        users = [FdBlocks(blocks=rng.standard_normal((3, 8)) + 0j) for _ in range(2)]
        stacked = np.stack([u.blocks for u in users])
        assert_allclose(
            apply_channel(users, channel, 0.0, RngStream(0)).y, apply_channel(stacked, channel, 0.0, RngStream(0)).y
        )

    def test_shape_mismatch(self):
        channel = generate_channel(4, 2, 8, 3, "iid-rayleigh", "per-frame", RngStream(1))
        with pytest.raises(ValueError):
            apply_channel(np.zeros((2, 2, 8), dtype=complex), channel, 0.1, RngStream(0))
        with pytest.raises(ValueError):
            apply_channel([FdBlocks(np.zeros((3, 8))), FdBlocks(np.zeros((2, 8)))], channel, 0.1, RngStream(0))


class TestDump:
    def test_csv_rows(self, tmp_path):
        channel = generate_channel(3, 2, 4, 2, "iid-rayleigh", "per-block", RngStream(1))
        path = tmp_path / "channel.csv"
        dump_channel_csv(channel, path)
        df = pd.read_csv(path)
        assert list(df.columns) == ["k", "m", "i", "j", "re", "im"]
        assert len(df) == 4 * 2 * 3 * 2
        row = df[(df.k == 1) & (df.m == 1) & (df.i == 2) & (df.j == 0)].iloc[0]
        assert row.re + 1j * row.im == pytest.approx(channel.H[1, 1, 2, 0])
