"""
Synthetic clips for closed-loop runs: speech-like harmonic signals with a
gliding pitch, moving formants and a syllabic envelope.
"""

from typing import List

import numpy as np

from core.audio import AudioBuffer


def speech_like(duration_s: float = 1.0, sample_rate: int = 16000, seed: int = 0,
                peak: float = 0.5) -> AudioBuffer:
    """
    Voiced-speech stand-in.

    Args:
        duration_s: Clip length in seconds
        sample_rate: Sample rate in Hz
        seed: Controls pitch contour, formant tracks and envelope
        peak: Peak absolute amplitude of the result

    Returns:
        AudioBuffer normalized to ``peak``
    """
    rng = np.random.default_rng(seed)
    n = max(int(round(duration_s * sample_rate)), 1)
    t = np.arange(n) / sample_rate

    f0 = rng.uniform(100.0, 180.0) * (1.0 + 0.1 * np.sin(2 * np.pi * rng.uniform(0.5, 2.0) * t))
    phase = 2 * np.pi * np.cumsum(f0) / sample_rate
    formant1 = rng.uniform(400.0, 800.0) + 150.0 * np.sin(2 * np.pi * rng.uniform(1.0, 3.0) * t)
    formant2 = rng.uniform(1200.0, 2200.0) + 300.0 * np.sin(2 * np.pi * rng.uniform(1.0, 3.0) * t + 1.0)

    signal = np.zeros(n)
    for k in range(1, int(4000 // 100) + 1):
        harmonic = k * f0
        weight = (np.exp(-((harmonic - formant1) / 150.0) ** 2)
                  + 0.6 * np.exp(-((harmonic - formant2) / 250.0) ** 2)
                  + 0.02)
        weight = np.where(harmonic < sample_rate / 2, weight, 0.0)
        signal += weight * np.sin(k * phase) / np.sqrt(k)

    syllable_rate = rng.uniform(3.0, 5.0)
    envelope = 0.55 - 0.45 * np.cos(2 * np.pi * syllable_rate * t)
    signal = signal * envelope + 0.003 * rng.standard_normal(n)
    peak_now = np.max(np.abs(signal))
    if peak_now > 0:
        signal = signal * (peak / peak_now)
    return AudioBuffer(signal, sample_rate)


def attack_fixtures(n: int, duration_s: float = 0.064, sample_rate: int = 16000,
                    peak: float = 0.1, seed: int = 0) -> List[AudioBuffer]:
    """``n`` short speech-like clips with distinct seeds."""
    return [speech_like(duration_s, sample_rate, seed=seed + i, peak=peak) for i in range(n)]
