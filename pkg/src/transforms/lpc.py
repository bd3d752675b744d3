"""
Linear predictive coding analysis and noise-excited resynthesis.

Each Hann-windowed frame is modelled as x(n) = sum_k a_k x(n-k) + e(n). The
coefficients minimize the mean squared prediction error (autocorrelation
method, solved by Levinson-Durbin), the residual RMS becomes the frame gain,
and the frame is resynthesized by driving the all-pole filter with seeded
white noise. Frames are overlap-added with a Hann window.
"""

from dataclasses import dataclass
from typing import List, Optional

import numpy as np
import structlog
from scipy.linalg import solve_toeplitz
from scipy.signal import lfilter

from core.audio import AudioBuffer, hann_window
from .config import TransformError

logger = structlog.get_logger("transforms.lpc")

_SILENCE_ENERGY = 1e-12


@dataclass(frozen=True)
class LpcFrame:
    """Analysis result for one window."""

    coefficients: np.ndarray
    gain: float
    position: int
    residual_energy: float
    frame_energy: float

    @property
    def is_silent(self) -> bool:
        return self.frame_energy <= _SILENCE_ENERGY


def estimate_lpc(frame: np.ndarray, order: int) -> np.ndarray:
    """
    Prediction coefficients a_1..a_p of an already windowed frame by the
    autocorrelation method (Levinson-Durbin via ``solve_toeplitz``).
    """
    n = len(frame)
    if order >= n:
        raise TransformError(f"LPC order {order} must be below the window length {n}")
    full = np.correlate(frame, frame, mode="full")
    r = full[n - 1:n + order]
    return solve_toeplitz(r[:order], r[1:order + 1])


def analyze_frame(frame: np.ndarray, order: int, position: int = 0) -> LpcFrame:
    """Estimate coefficients, residual and gain for one windowed frame."""
    frame_energy = float(np.dot(frame, frame))
    if frame_energy <= _SILENCE_ENERGY:
        return LpcFrame(np.zeros(order), 0.0, position, 0.0, frame_energy)

    try:
        coefficients = estimate_lpc(frame, order)
    except np.linalg.LinAlgError:
        coefficients = np.full(order, np.nan)
    if not np.all(np.isfinite(coefficients)):
        # Singular autocorrelation: fall back to the zero predictor.
        gain = float(np.sqrt(frame_energy / len(frame)))
        return LpcFrame(np.zeros(order), gain, position, frame_energy, frame_energy)
    residual = lfilter(np.concatenate(([1.0], -coefficients)), [1.0], frame)
    residual_energy = float(np.dot(residual, residual))
    gain = float(np.sqrt(residual_energy / len(frame)))
    return LpcFrame(coefficients, gain, position, residual_energy, frame_energy)


def excitation(seed: int, frame_index: int, size: int) -> np.ndarray:
    """
    Unit-variance white Gaussian noise for one frame. Philox is counter-based:
    the seed is the key and the frame index selects a disjoint counter block.
    """
    generator = np.random.Generator(np.random.Philox(key=seed, counter=[0, frame_index, 0, 0]))
    return generator.standard_normal(size)


def _window_samples(sample_rate: int, ms: float) -> int:
    return max(int(round(sample_rate * ms / 1000.0)), 1)


def lpc_analyze(x: AudioBuffer, order: int, window_ms: float = 25.0,
                hop_ms: float = 12.5) -> List[LpcFrame]:
    """Frame-by-frame LPC analysis over a zero-padded signal."""
    window_length = _window_samples(x.sample_rate, window_ms)
    hop_length = _window_samples(x.sample_rate, hop_ms)
    if order >= window_length:
        raise TransformError(f"LPC order {order} must be below the window length {window_length}")

    padded, n_frames = _pad(x.samples, window_length, hop_length)
    window = hann_window(window_length)
    frames = []
    for index in range(n_frames):
        start = index * hop_length
        frames.append(analyze_frame(padded[start:start + window_length] * window, order, start))
    return frames


def _pad(samples: np.ndarray, window_length: int, hop_length: int):
    half = window_length // 2
    n_frames = 1 + int(np.ceil(len(samples) / hop_length))
    total = (n_frames - 1) * hop_length + window_length
    padded = np.zeros(total)
    padded[half:half + len(samples)] = samples
    return padded, n_frames


def lpc_transform(x: AudioBuffer, order: int = 20, window_ms: float = 25.0,
                  hop_ms: float = 12.5, seed: int = 0,
                  frames_out: Optional[List[LpcFrame]] = None) -> AudioBuffer:
    """
    LPC analysis followed by noise-excited resynthesis.

    Args:
        x: Input audio
        order: Predictor order p
        window_ms: Analysis window length in milliseconds
        hop_ms: Hop between windows in milliseconds
        seed: Excitation seed; same input and seed give bit-identical output
        frames_out: Optional list receiving the per-frame analysis

    Returns:
        Resynthesized audio, hard-clipped to [-1, 1]
    """
    window_length = _window_samples(x.sample_rate, window_ms)
    hop_length = _window_samples(x.sample_rate, hop_ms)
    frames = lpc_analyze(x, order, window_ms, hop_ms)
    if frames_out is not None:
        frames_out.extend(frames)

    window = hann_window(window_length)
    # Gain is measured on the windowed frame; rescale to the unwindowed level.
    window_rms = float(np.sqrt(np.mean(window ** 2)))
    overlap_norm = np.zeros((len(frames) - 1) * hop_length + window_length)
    for index in range(len(frames)):
        overlap_norm[index * hop_length:index * hop_length + window_length] += window

    out = np.zeros_like(overlap_norm)
    for index, frame in enumerate(frames):
        if frame.is_silent or frame.gain == 0.0:
            continue
        noise = excitation(seed, index, window_length)
        synthesized = lfilter([1.0], np.concatenate(([1.0], -frame.coefficients)), noise)
        synthesized *= frame.gain / window_rms
        out[frame.position:frame.position + window_length] += synthesized * window

    covered = overlap_norm > 1e-8
    out[covered] /= overlap_norm[covered]
    half = window_length // 2
    result = np.clip(out[half:half + len(x)], -1.0, 1.0)
    result = np.nan_to_num(result, nan=0.0, posinf=1.0, neginf=-1.0)
    return x.with_samples(result)
