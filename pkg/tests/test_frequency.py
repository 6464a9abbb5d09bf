import numpy as np
import pytest
import torch

from fakegraph.frequency import (
    BandMixer,
    FrequencyDecomposer,
    band_energies,
    build_band_masks,
    dct2,
    dct_matrix,
    default_cutoffs,
    idct2,
)
from oracles import dct2_reference, idct2_reference


class TestDct2:
    def test_matches_bruteforce_small_sizes(self):
        rng = np.random.default_rng(0)
        for h, w in [(1, 1), (2, 2), (3, 5), (4, 4), (7, 3), (8, 8)]:
            x = rng.standard_normal((h, w))
            assert np.max(np.abs(dct2(x) - dct2_reference(x))) < 1e-10
            assert np.max(np.abs(idct2(x) - idct2_reference(x))) < 1e-10

    def test_2x2_frozen_values(self):
        # frozen from the O(N^4) summation oracle
        x = np.array([[1.0, 2.0], [3.0, 4.0]])
        expected = np.array([[5.0, -1.0], [-2.0, 0.0]])
        assert np.max(np.abs(dct2_reference(x) - expected)) < 1e-12
        assert np.max(np.abs(dct2(x) - expected)) < 1e-12

    def test_constant_image_dc_only(self):
        c = 0.73
        spec = dct2(np.full((5, 9), c))
        assert spec[0, 0] == pytest.approx(c * np.sqrt(5 * 9), abs=1e-12)
        spec[0, 0] = 0.0
        assert np.max(np.abs(spec)) < 1e-12

    def test_roundtrip_float32(self):
        rng = np.random.default_rng(1)
        x = rng.random((64, 48)).astype(np.float32)
        back = idct2(dct2(x))
        assert np.max(np.abs(back - x)) < 1e-6

    def test_dct_matrix_orthonormal(self):
        for n in (1, 2, 5, 16):
            c = dct_matrix(n)
            assert np.max(np.abs(c @ c.T - np.eye(n))) < 1e-12

    def test_rejects_bad_shapes(self):
        with pytest.raises(ValueError):
            dct2(np.zeros(4))
        with pytest.raises(ValueError):
            idct2(np.zeros((2, 3, 4)))

    def test_torch_spectrum_matches_scipy(self):
        rng = np.random.default_rng(2)
        x = rng.standard_normal((2, 3, 8, 6))
        dec = FrequencyDecomposer(8, 6).double()
        spec = dec.spectrum(torch.from_numpy(x)).numpy()
        for i in range(2):
            for c in range(3):
                assert np.max(np.abs(spec[i, c] - dct2(x[i, c]))) < 1e-10


class TestBandMasks:
    def test_strict_inequality_toy_band(self):
        masks = build_band_masks(
            3, 3, {"low": (-1, 2), "mid": (1, 4), "high": (3, 5)}
        )
        low = masks.fixed[0]
        expected = np.array([[1, 1, 0], [1, 0, 0], [0, 0, 0]], dtype=float)
        assert np.array_equal(low, expected)

    def test_masks_binary_and_symmetric(self):
        for h in (3, 17, 64):
            masks = build_band_masks(h, h)
            for m in masks.fixed:
                assert set(np.unique(m)) <= {0.0, 1.0}
                assert np.array_equal(m, m.T)

    def test_all_pass_is_ones(self):
        masks = build_band_masks(10, 12)
        assert np.array_equal(masks.fixed[3], np.ones((10, 12)))

    def test_default_cutoffs_partition_full_support(self):
        # exhaustive at paper scale: every coefficient in exactly one band
        masks = build_band_masks(320, 320)
        coverage = masks.fixed[0] + masks.fixed[1] + masks.fixed[2]
        assert np.array_equal(coverage, np.ones((320, 320)))

    def test_default_cutoffs_monotone(self):
        cuts = default_cutoffs(64, 64)
        assert cuts["low"][1] == cuts["mid"][0] + 1
        assert cuts["mid"][1] == cuts["high"][0] + 1

    def test_overlapping_cutoffs_rejected(self):
        with pytest.raises(ValueError, match="overlap"):
            build_band_masks(8, 8, {"low": (-1, 5), "mid": (2, 9), "high": (8, 15)})

    def test_gapping_cutoffs_rejected(self):
        with pytest.raises(ValueError, match="uncovered"):
            build_band_masks(8, 8, {"low": (-1, 3), "mid": (4, 9), "high": (8, 15)})

    def test_empty_band_rejected(self):
        with pytest.raises(ValueError, match="empty"):
            build_band_masks(8, 8, {"low": (5, 5), "mid": (4, 9), "high": (8, 15)})

    def test_learnable_init_zero(self):
        masks = build_band_masks(6, 6)
        assert np.array_equal(masks.learnable_init, np.zeros((4, 6, 6)))


class TestFrequencyDecomposer:
    def test_zero_frame_zero_stack(self):
        dec = FrequencyDecomposer(8, 8)
        out = dec(torch.zeros(2, 3, 8, 8))
        assert out.shape == (2, 12, 8, 8)
        assert torch.all(out == 0)

    def test_all_pass_band_identity_with_sigma_suppressed(self):
        dec = FrequencyDecomposer(16, 16).double()
        with torch.no_grad():
            dec.learnable_masks.fill_(-60.0)  # sigmoid underflows to 0
        x = torch.rand(1, 3, 16, 16, dtype=torch.float64)
        out = dec(x).detach()
        all_band = out[:, 9:12]  # band-major: all-pass occupies channels 9..11
        assert torch.max(torch.abs(all_band - x)) < 1e-10

    def test_low_band_impulse_matches_bruteforce(self):
        h = w = 6
        cuts = default_cutoffs(h, w)
        dec = FrequencyDecomposer(h, w).double()
        with torch.no_grad():
            dec.learnable_masks.fill_(-60.0)
        frame = torch.zeros(1, 3, h, w, dtype=torch.float64)
        frame[0, 0, 2, 3] = 1.0

        # oracle: brute-force DCT, Eq-style strict mask, brute-force inverse
        spec = dct2_reference(frame[0, 0].numpy())
        s = np.arange(h)[:, None] + np.arange(w)[None, :]
        mask = ((s > cuts["low"][0]) & (s < cuts["low"][1])).astype(float)
        expected = idct2_reference(spec * mask)

        got = dec(frame)[0, 0].detach().numpy()  # low band, channel 0
        assert np.max(np.abs(got - expected)) < 1e-10

    def test_band_major_stack_layout(self):
        # with sigma suppressed, channel b*3+c must be the b-band of channel c
        dec = FrequencyDecomposer(8, 8).double()
        with torch.no_grad():
            dec.learnable_masks.fill_(-60.0)
        x = torch.rand(1, 3, 8, 8, dtype=torch.float64)
        out = dec(x).detach()
        for b in range(4):
            for c in range(3):
                spec = dct2(x[0, c].numpy())
                expected = idct2(spec * dec.fixed_masks[b].numpy())
                assert np.max(np.abs(out[0, b * 3 + c].numpy() - expected)) < 1e-9

    def test_energy_partition_with_sigma_zeroed(self):
        # low + mid + high masked spectra reproduce the all-pass spectrum
        rng = np.random.default_rng(3)
        masks = build_band_masks(12, 12)
        spec = rng.standard_normal((12, 12))
        partial = sum(spec * masks.fixed[b] for b in range(3))
        assert np.max(np.abs(partial - spec * masks.fixed[3])) < 1e-12

    def test_shape_mismatch_rejected(self):
        dec = FrequencyDecomposer(8, 8)
        with pytest.raises(ValueError, match="does not match"):
            dec(torch.zeros(1, 3, 8, 10))
        with pytest.raises(ValueError, match="3-channel"):
            dec(torch.zeros(1, 4, 8, 8))

    def test_random_mask_init(self):
        torch.manual_seed(0)
        dec = FrequencyDecomposer(8, 8, mask_init="random")
        assert not torch.all(dec.learnable_masks == 0)
        with pytest.raises(ValueError):
            FrequencyDecomposer(8, 8, mask_init="bogus")


class TestBandMixer:
    def test_selector_weights_pick_first_bands(self):
        mixer = BandMixer()
        with torch.no_grad():
            mixer.mix.weight.zero_()
            mixer.mix.bias.zero_()
            for c in range(3):
                mixer.mix.weight[c, c, 0, 0] = 1.0
        stack = torch.rand(2, 12, 8, 8)
        out = mixer(stack)
        assert torch.equal(out, stack[:, :3])

    def test_zero_stack_bias_only(self):
        mixer = BandMixer()
        out = mixer(torch.zeros(1, 12, 4, 4))
        expected = mixer.mix.bias.detach().view(1, 3, 1, 1).expand(1, 3, 4, 4)
        assert torch.allclose(out, expected)

    def test_matches_pointwise_oracle(self):
        torch.manual_seed(4)
        mixer = BandMixer().double()
        stack = torch.rand(1, 12, 5, 7, dtype=torch.float64)
        out = mixer(stack)[0].detach().numpy()
        w = mixer.mix.weight.detach().numpy()[:, :, 0, 0]  # (3, 12)
        b = mixer.mix.bias.detach().numpy()
        s = stack[0].numpy()
        for o in range(3):
            for i in range(5):
                for j in range(7):
                    ref = b[o] + sum(w[o, k] * s[k, i, j] for k in range(12))
                    assert abs(out[o, i, j] - ref) < 1e-12

    def test_wrong_channel_count_rejected(self):
        with pytest.raises(ValueError):
            BandMixer()(torch.zeros(1, 5, 4, 4))


class TestBandEnergies:
    def test_constant_image_low_band_only(self):
        e = band_energies(np.full((16, 16), 0.5))
        assert e[0] > 0
        assert e[1] == pytest.approx(0.0, abs=1e-18)
        assert e[2] == pytest.approx(0.0, abs=1e-18)

    def test_checkerboard_concentrates_in_high_band(self):
        n = 16
        checker = ((np.indices((n, n)).sum(axis=0) % 2) * 2 - 1).astype(float)
        e = band_energies(checker)
        assert e[2] > 100 * (e[0] + e[1])

    def test_all_band_sums_parts(self):
        rng = np.random.default_rng(5)
        img = rng.random((12, 12))
        e = band_energies(img)
        assert e[3] == pytest.approx(e[0] + e[1] + e[2], rel=1e-12)
