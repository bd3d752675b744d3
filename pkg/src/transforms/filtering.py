"""
Spectral-centroid driven low-shelf/high-shelf filtering.

Shelves are RBJ audio-EQ-cookbook biquads placed at ``low_factor * C`` and
``high_factor * C`` where C is the median per-frame spectral centroid.
"""

from typing import Literal

import librosa
import numpy as np
import structlog
from scipy.signal import sosfilt

from core.audio import AudioBuffer, stft

logger = structlog.get_logger("transforms.filtering")

# Shelf corners are kept strictly inside (0, Nyquist).
_MAX_CORNER_RATIO = 0.49
_MIN_CORNER_HZ = 1.0


def spectral_centroids(x: AudioBuffer, frame_length: int = 512, hop_length: int = 128) -> np.ndarray:
    """
    Per-frame spectral centroid in Hz, ``sum(f * m_f) / sum(m_f)`` over the
    magnitude spectrogram. Frames without energy are dropped.
    """
    magnitudes = stft(x, frame_length, hop_length).magnitude()
    energy = magnitudes.sum(axis=1)
    centroids = librosa.feature.spectral_centroid(
        S=magnitudes.T, sr=x.sample_rate, n_fft=frame_length
    )[0]
    return centroids[energy > 0]


def median_centroid(x: AudioBuffer, frame_length: int = 512, hop_length: int = 128) -> float:
    """Median of the per-frame spectral centroids; 0.0 for silent input."""
    centroids = spectral_centroids(x, frame_length, hop_length)
    if centroids.size == 0:
        return 0.0
    return float(np.median(centroids))


def shelf_sos(kind: Literal["low", "high"], corner_hz: float, sample_rate: int,
              gain_db: float, q: float = 0.707) -> np.ndarray:
    """
    Second-order section for an RBJ shelving filter.

    Args:
        kind: 'low' or 'high'
        corner_hz: Shelf midpoint frequency
        sample_rate: Sample rate in Hz
        gain_db: Shelf gain (negative attenuates)
        q: Shelf quality factor

    Returns:
        Array [b0, b1, b2, 1, a1, a2] normalized by a0
    """
    corner_hz = float(np.clip(corner_hz, _MIN_CORNER_HZ, _MAX_CORNER_RATIO * sample_rate))
    A = 10.0 ** (gain_db / 40.0)
    w0 = 2.0 * np.pi * corner_hz / sample_rate
    cos_w0 = np.cos(w0)
    alpha = np.sin(w0) / (2.0 * q)
    two_sqrt_a_alpha = 2.0 * np.sqrt(A) * alpha

    if kind == "low":
        b0 = A * ((A + 1) - (A - 1) * cos_w0 + two_sqrt_a_alpha)
        b1 = 2 * A * ((A - 1) - (A + 1) * cos_w0)
        b2 = A * ((A + 1) - (A - 1) * cos_w0 - two_sqrt_a_alpha)
        a0 = (A + 1) + (A - 1) * cos_w0 + two_sqrt_a_alpha
        a1 = -2 * ((A - 1) + (A + 1) * cos_w0)
        a2 = (A + 1) + (A - 1) * cos_w0 - two_sqrt_a_alpha
    elif kind == "high":
        b0 = A * ((A + 1) + (A - 1) * cos_w0 + two_sqrt_a_alpha)
        b1 = -2 * A * ((A - 1) + (A + 1) * cos_w0)
        b2 = A * ((A + 1) + (A - 1) * cos_w0 - two_sqrt_a_alpha)
        a0 = (A + 1) - (A - 1) * cos_w0 + two_sqrt_a_alpha
        a1 = 2 * ((A - 1) - (A + 1) * cos_w0)
        a2 = (A + 1) - (A - 1) * cos_w0 - two_sqrt_a_alpha
    else:
        raise ValueError(f"Unknown shelf kind: {kind}")

    return np.array([b0, b1, b2, a0, a1, a2]) / a0


def shelf_filter(x: AudioBuffer, low_factor: float = 0.1, high_factor: float = 1.5,
                 gain_db: float = -30.0, q: float = 0.707,
                 frame_length: int = 512, hop_length: int = 128) -> AudioBuffer:
    """
    Attenuate content below ``low_factor * C`` and above ``high_factor * C``.

    Silent input is returned unchanged.
    """
    centroid = median_centroid(x, frame_length, hop_length) if len(x) else 0.0
    if centroid <= 0.0:
        return x.with_samples(x.samples.copy())

    sos = np.vstack([
        shelf_sos("low", low_factor * centroid, x.sample_rate, gain_db, q),
        shelf_sos("high", high_factor * centroid, x.sample_rate, gain_db, q),
    ])
    logger.debug("Shelf filter", centroid_hz=round(centroid, 2),
                 low_hz=round(low_factor * centroid, 2), high_hz=round(high_factor * centroid, 2))
    return x.with_samples(sosfilt(sos, x.samples))
