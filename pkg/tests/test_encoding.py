import numpy as np
import pytest

from qlifnet.encoding import EncoderConfig, count_decode, predict, rate_encode


class TestRateEncode:
    def test_zero_intensity_never_spikes(self):
        cfg = EncoderConfig(timesteps=50, seed=1)
        spikes = rate_encode(np.zeros((3, 8)), cfg)
        assert spikes.shape == (50, 3, 8)
        assert not spikes.any()

    def test_full_intensity_always_spikes(self):
        cfg = EncoderConfig(timesteps=50, seed=1)
        spikes = rate_encode(np.ones((2, 4)), cfg)
        assert spikes.all()

    def test_binary_values_only(self):
        cfg = EncoderConfig(timesteps=20, seed=3)
        spikes = rate_encode(np.random.default_rng(0).random((4, 6)), cfg)
        assert set(np.unique(spikes)) <= {0.0, 1.0}

    def test_half_intensity_count_concentrates(self):
        # Binomial(1000, 0.5) stays within 6 sigma of 500.
        cfg = EncoderConfig(timesteps=1000, seed=42)
        spikes = rate_encode(np.full((1, 1), 0.5), cfg)
        count = spikes.sum()
        assert 400 <= count <= 600

    def test_reproducible(self):
        cfg = EncoderConfig(timesteps=30, seed=9)
        values = np.random.default_rng(1).random((5, 7))
        first = rate_encode(values, cfg, sample_indices=np.arange(5), stream=2)
        second = rate_encode(values, cfg, sample_indices=np.arange(5), stream=2)
        np.testing.assert_array_equal(first, second)

    def test_independent_of_batch_composition(self):
        # Sample 3 encoded alone equals sample 3 encoded inside a batch.
        cfg = EncoderConfig(timesteps=15, seed=5)
        values = np.random.default_rng(2).random((6, 4))
        batch = rate_encode(values, cfg, sample_indices=np.arange(6), stream=1)
        alone = rate_encode(values[3:4], cfg, sample_indices=np.array([3]), stream=1)
        np.testing.assert_array_equal(batch[:, 3], alone[:, 0])

    def test_streams_differ(self):
        cfg = EncoderConfig(timesteps=40, seed=5)
        values = np.full((1, 10), 0.5)
        a = rate_encode(values, cfg, stream=1)
        b = rate_encode(values, cfg, stream=2)
        assert (a != b).any()

    def test_expected_count_monotone_in_intensity(self):
        # 6 sigma separation at T = 10^4 between p = 0.3 and p = 0.7.
        cfg = EncoderConfig(timesteps=10_000, seed=11)
        spikes = rate_encode(np.array([[0.3, 0.7]]), cfg)
        low, high = spikes.sum(axis=0)[0]
        sigma = np.sqrt(10_000 * 0.25)
        assert high - low > 6 * sigma

    def test_rejects_out_of_range(self):
        cfg = EncoderConfig(timesteps=5, seed=0)
        with pytest.raises(ValueError):
            rate_encode(np.array([[1.2]]), cfg)
        with pytest.raises(ValueError):
            rate_encode(np.array([[-0.1]]), cfg)

    def test_rejects_bad_timesteps(self):
        with pytest.raises(ValueError):
            EncoderConfig(timesteps=0)

    def test_image_shaped_input(self):
        cfg = EncoderConfig(timesteps=4, seed=2)
        spikes = rate_encode(np.zeros((2, 1, 5, 5)), cfg)
        assert spikes.shape == (4, 2, 1, 5, 5)


class TestCountDecode:
    def test_all_zero(self):
        scores = count_decode(np.zeros((7, 2, 10)))
        np.testing.assert_array_equal(scores, np.zeros((2, 10)))
        assert predict(scores)[0] == 0  # ties break toward class 0

    def test_single_spike(self):
        spikes = np.zeros((5, 1, 10))
        spikes[2, 0, 3] = 1.0
        scores = count_decode(spikes)
        np.testing.assert_array_equal(scores[0], np.eye(10)[3])
        assert predict(scores)[0] == 3

    def test_tie_breaks_to_smallest_index(self):
        scores = np.array([[5.0, 9.0, 9.0, 0.0]])
        assert predict(scores)[0] == 1

    def test_total_spikes_preserved(self):
        rng = np.random.default_rng(6)
        spikes = (rng.random((9, 4, 10)) < 0.3).astype(float)
        assert count_decode(spikes).sum() == spikes.sum()
