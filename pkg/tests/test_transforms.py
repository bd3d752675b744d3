"""Tests for the input transformation functions."""

import time
from dataclasses import replace

import numpy as np
import pytest
from pydantic import ValidationError
from scipy.signal import lfilter

from attack.fixtures import speech_like
from core.audio import AudioBuffer, hann_window, stft
from transforms import (
    IdentityConfig,
    LpcConfig,
    MelInvertConfig,
    QuantizeConfig,
    ResampleConfig,
    ShelfFilterConfig,
    TransformError,
    apply,
    down_up_sample,
    lpc_transform,
    mel_extract,
    parse_transform,
    quantize_dequantize,
    shelf_filter,
)
from transforms.filtering import median_centroid, shelf_sos
from transforms.lpc import estimate_lpc, lpc_analyze
from transforms.mel import griffin_lim, mel_extract_invert, mel_invert

ALL_CONFIGS = [
    QuantizeConfig(bits=6),
    ResampleConfig(intermediate_rate=6000),
    ShelfFilterConfig(),
    MelInvertConfig(n_mels=80, griffin_lim_iters=8),
    LpcConfig(order=20),
    IdentityConfig(),
]


# ---------------------------------------------------------------------------
# Quantization
# ---------------------------------------------------------------------------


class TestQuantize:
    @pytest.mark.parametrize("bits", list(range(1, 17)))
    def test_error_is_at_most_half_a_step(self, bits):
        step = 2.0 / (1 << bits)
        rng = np.random.default_rng(bits)
        x = AudioBuffer(rng.uniform(-1.0, 1.0 - step / 2, size=100000), 16000)
        y = quantize_dequantize(x, bits)
        assert np.max(np.abs(y.samples - x.samples)) <= step / 2 + 1e-12

    def test_sixteen_bits_is_identity_on_pcm_lattice(self):
        rng = np.random.default_rng(0)
        x = AudioBuffer.from_pcm16(rng.integers(-32768, 32767, size=5000), 16000)
        np.testing.assert_array_equal(quantize_dequantize(x, 16).samples, x.samples)

    def test_one_bit_has_two_levels(self, speech):
        levels = set(np.unique(quantize_dequantize(speech, 1).samples).tolist())
        assert levels <= {-1.0, 0.0}

    def test_saturates_at_top_level(self):
        y = quantize_dequantize(AudioBuffer(np.array([1.0, 0.999]), 16000), 3)
        np.testing.assert_allclose(y.samples, [0.75, 0.75])

    def test_six_bit_rounds_to_nearest_level(self):
        x = AudioBuffer(np.array([12345 / 32768]), 16000)
        assert quantize_dequantize(x, 6).samples[0] == 12288 / 32768

    @pytest.mark.parametrize("bits", [0, 17])
    def test_rejects_bad_depth(self, speech, bits):
        with pytest.raises(TransformError):
            quantize_dequantize(speech, bits)


# ---------------------------------------------------------------------------
# Down-sampling / up-sampling
# ---------------------------------------------------------------------------


class TestResample:
    def test_low_tone_survives(self, tone):
        x = tone(200.0)
        y = down_up_sample(x, 6000)
        noise_power = np.mean((y.samples - x.samples) ** 2)
        snr_db = 10 * np.log10(np.mean(x.samples ** 2) / noise_power)
        assert snr_db >= 20.0

    def test_dc_is_preserved(self):
        x = AudioBuffer(np.full(16000, 0.25), 16000)
        np.testing.assert_allclose(down_up_sample(x, 6000).samples, 0.25, atol=1e-9)

    def test_ramp_is_preserved(self):
        x = AudioBuffer(np.linspace(-0.5, 0.5, 4001), 16000)
        np.testing.assert_allclose(down_up_sample(x, 6000).samples, x.samples, atol=1e-9)

    def test_preserves_length_and_rate(self, speech):
        y = down_up_sample(speech, 6000)
        assert len(y) == len(speech)
        assert y.sample_rate == speech.sample_rate

    @pytest.mark.parametrize("rate", [0, 16000, 22050])
    def test_rejects_rate_outside_range(self, speech, rate):
        with pytest.raises(TransformError):
            down_up_sample(speech, rate)


# ---------------------------------------------------------------------------
# Shelf filtering
# ---------------------------------------------------------------------------


class TestShelfFilter:
    def test_low_shelf_gain_at_dc(self):
        sos = shelf_sos("low", 200.0, 16000, -30.0)
        assert np.sum(sos[:3]) / np.sum(sos[3:]) == pytest.approx(10 ** (-30 / 20), rel=1e-9)

    def test_high_shelf_gain_at_nyquist(self):
        b0, b1, b2, a0, a1, a2 = shelf_sos("high", 2000.0, 16000, -30.0)
        assert (b0 - b1 + b2) / (a0 - a1 + a2) == pytest.approx(10 ** (-30 / 20), rel=1e-9)

    def test_silence_is_unchanged(self):
        x = AudioBuffer(np.zeros(4000), 16000)
        np.testing.assert_array_equal(shelf_filter(x).samples, x.samples)

    def test_tone_centroid_is_its_frequency(self, tone):
        assert median_centroid(tone(1000.0)) == pytest.approx(1000.0, abs=16000 / 512)

    def test_white_noise_loses_both_shelf_bands(self, noise):
        x = noise(duration_s=2.0, seed=5)
        centroid = median_centroid(x)
        y = shelf_filter(x)

        freqs = np.fft.rfftfreq(len(x), 1.0 / x.sample_rate)
        power_in = np.abs(np.fft.rfft(x.samples)) ** 2
        power_out = np.abs(np.fft.rfft(y.samples)) ** 2
        for band in (freqs < 0.1 * centroid, freqs > 1.5 * centroid):
            drop_db = 10 * np.log10(power_in[band].sum() / power_out[band].sum())
            assert drop_db >= 20.0

    def test_attenuates_far_above_centroid(self, tone):
        x = AudioBuffer(tone(1000.0).samples + tone(7000.0, amplitude=0.05).samples, 16000)
        centroid = median_centroid(x)
        assert 1000.0 < centroid < 2500.0

        y = shelf_filter(x)
        spectrum_in = np.abs(np.fft.rfft(x.samples))
        spectrum_out = np.abs(np.fft.rfft(y.samples))
        loss_1k = 20 * np.log10(spectrum_in[1000] / spectrum_out[1000])
        loss_7k = 20 * np.log10(spectrum_in[7000] / spectrum_out[7000])
        assert loss_7k > 20.0
        assert loss_7k - loss_1k > 15.0


# ---------------------------------------------------------------------------
# Mel extraction / inversion
# ---------------------------------------------------------------------------


class TestMel:
    def test_shape(self, speech):
        mel = mel_extract(speech, 80)
        assert mel.values.shape == (stft(speech).n_frames, 80)
        assert np.all(mel.values >= np.log(1e-5))

    def test_rejects_too_many_bins(self, speech):
        with pytest.raises(TransformError):
            mel_extract(speech, 257, frame_length=512)

    def test_silence_sits_on_the_floor(self):
        mel = mel_extract(AudioBuffer(np.zeros(4000), 16000), 80)
        np.testing.assert_array_equal(mel.values, np.log(1e-5))

    def test_doubling_adds_log_two(self, speech):
        base = mel_extract(speech, 80).values
        doubled = mel_extract(speech.with_samples(2.0 * speech.samples), 80).values
        above_floor = base > np.log(1e-5)
        assert above_floor.any()
        np.testing.assert_allclose(doubled[above_floor] - base[above_floor], np.log(2.0), atol=1e-9)

    def test_ignores_polarity(self, speech):
        flipped = mel_extract(speech.with_samples(-speech.samples), 80)
        np.testing.assert_array_equal(flipped.values, mel_extract(speech, 80).values)

    def test_round_trip_keeps_dominant_bin(self, tone):
        x = tone(440.0)
        y = mel_extract_invert(x, 80, 32)
        assert len(y) == len(x)
        dominant_in = np.argmax(stft(x).magnitude().mean(axis=0))
        dominant_out = np.argmax(stft(y).magnitude().mean(axis=0))
        assert abs(int(dominant_in) - int(dominant_out)) <= 1

    def test_inversion_keeps_loudness(self, speech):
        trace = []
        y = mel_invert(mel_extract(speech, 80), 32, error_trace=trace)
        rms_in = np.sqrt(np.mean(speech.samples ** 2))
        rms_out = np.sqrt(np.mean(y.samples ** 2))
        assert len(y) == len(speech)
        assert abs(20 * np.log10(rms_out / rms_in)) < 20.0
        assert len(trace) == 33

    def test_inversion_rejects_geometry_mismatch(self, speech):
        mel = mel_extract(speech, 80)
        with pytest.raises(TransformError):
            mel_invert(replace(mel, values=mel.values[:-1]))

    def test_griffin_lim_error_never_increases(self):
        rng = np.random.default_rng(0)
        for _ in range(10):
            target = rng.uniform(0.0, 1.0, size=(20, 257))
            _, errors = griffin_lim(target, 512, 128, 32)
            assert len(errors) == 33
            for before, after in zip(errors, errors[1:]):
                assert after <= before * (1 + 1e-9) + 1e-12


# ---------------------------------------------------------------------------
# LPC
# ---------------------------------------------------------------------------


class TestLpc:
    def test_recovers_ar4_coefficients(self):
        poles = [0.7 * np.exp(0.5j), 0.7 * np.exp(-0.5j), 0.8 * np.exp(1.5j), 0.8 * np.exp(-1.5j)]
        denominator = np.real(np.poly(poles))
        truth = -denominator[1:]
        rng = np.random.default_rng(0)
        signal = lfilter([1.0], denominator, rng.standard_normal(8000))
        estimate = estimate_lpc(signal * hann_window(len(signal)), 4)
        np.testing.assert_allclose(estimate, truth, atol=0.1)

    def test_residual_never_exceeds_frame_energy(self):
        for seed in range(3):
            frames = lpc_analyze(speech_like(0.5, 16000, seed=seed), 20)
            for frame in frames:
                assert frame.residual_energy <= frame.frame_energy * (1 + 1e-9) + 1e-15

    def test_same_seed_is_bit_identical(self, speech):
        first = lpc_transform(speech, 20, seed=3)
        second = lpc_transform(speech, 20, seed=3)
        np.testing.assert_array_equal(first.samples, second.samples)
        assert not np.array_equal(first.samples, lpc_transform(speech, 20, seed=4).samples)

    def test_output_is_bounded(self, speech):
        y = lpc_transform(speech, 20)
        assert len(y) == len(speech)
        assert np.max(np.abs(y.samples)) <= 1.0

    def test_silence_stays_silent(self):
        y = lpc_transform(AudioBuffer(np.zeros(8000), 16000), 20)
        np.testing.assert_array_equal(y.samples, 0.0)

    def test_rejects_order_at_window_length(self, speech):
        with pytest.raises(TransformError):
            lpc_transform(speech, order=400, window_ms=25.0)


# ---------------------------------------------------------------------------
# Dispatch and configs
# ---------------------------------------------------------------------------


class TestApply:
    @pytest.mark.parametrize("g", ALL_CONFIGS, ids=lambda g: g.type)
    def test_preserves_length_rate_and_finiteness(self, g):
        x = speech_like(0.5, 16000, seed=1)
        y = apply(g, x)
        assert len(y) == len(x)
        assert y.sample_rate == x.sample_rate
        assert np.all(np.isfinite(y.samples))

    def test_identity_returns_input(self, speech):
        assert apply(IdentityConfig(), speech) is speech

    def test_parse_from_json(self):
        g = parse_transform('{"type": "quantize", "bits": 4}')
        assert g == QuantizeConfig(bits=4)
        assert g.to_json_dict() == {"type": "quantize", "bits": 4}

    def test_parse_rejects_unknown_type(self):
        with pytest.raises(ValidationError):
            parse_transform({"type": "reverb"})

    def test_parse_rejects_extra_fields(self):
        with pytest.raises(ValidationError):
            parse_transform({"type": "quantize", "bits": 4, "dither": True})

    def test_labels(self):
        assert QuantizeConfig(bits=6).label == "Quantization-Dequantization (6 bits)"
        assert MelInvertConfig(n_mels=80).label == "Mel Extraction-Inversion (80 bins)"


class TestWallClock:
    """Single-threaded wall-clock limits on a 5 s clip at 16 kHz."""

    LIMITS = [
        (QuantizeConfig(bits=6), 0.01),
        (ShelfFilterConfig(), 0.1),
        (ResampleConfig(intermediate_rate=6000), 0.2),
        (MelInvertConfig(n_mels=80, griffin_lim_iters=32), 1.0),
        (LpcConfig(order=20), 1.5),
    ]

    @pytest.mark.parametrize("g,limit", LIMITS, ids=lambda v: getattr(v, "type", str(v)))
    def test_within_limit(self, g, limit):
        x = speech_like(5.0, 16000, seed=0)
        apply(g, x.with_samples(x.samples[:16000]))  # warm-up
        start = time.perf_counter()
        apply(g, x)
        assert time.perf_counter() - start < limit
