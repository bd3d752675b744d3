"""Quantization-dequantization of waveform samples."""

import numpy as np

from core.audio import AudioBuffer
from .config import TransformError


def quantize_dequantize(x: AudioBuffer, bits: int) -> AudioBuffer:
    """
    Map every sample to the nearest of 2**bits mid-tread levels.

    Levels are ``k * step`` for integer k in [-2**(bits-1), 2**(bits-1) - 1] with
    ``step = 2 / 2**bits``; rounding is half away from zero and values past the
    top level saturate to it.

    Args:
        x: Input audio
        bits: Quantizer depth, 1..16

    Returns:
        Dequantized audio with the same length and rate
    """
    if not 1 <= bits <= 16:
        raise TransformError(f"quantizer bits must be in [1, 16], got {bits}")
    step = 2.0 / (1 << bits)
    scaled = x.samples / step
    k = np.sign(scaled) * np.floor(np.abs(scaled) + 0.5)
    half_levels = 1 << (bits - 1)
    k = np.clip(k, -half_levels, half_levels - 1)
    return x.with_samples(k * step)
