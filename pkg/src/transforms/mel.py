"""
Mel extraction and inversion.

Extraction discards phase and compresses |STFT| with an HTK-scale triangular
filterbank, then takes the log. Inversion maps back through a
transpose-normalized filterbank and estimates phase with Griffin-Lim.
"""

from dataclasses import dataclass
from typing import List, Optional, Tuple

import librosa
import numpy as np
import structlog

from core.audio import (
    AudioBuffer,
    analyze,
    n_frames_for,
    overlap_add,
    stft,
)
from .config import TransformError

logger = structlog.get_logger("transforms.mel")

LOG_FLOOR = 1e-5


@dataclass(frozen=True)
class MelSpectrogram:
    """Log-amplitude Mel spectrogram, shape [n_frames, n_mels], with its STFT geometry."""

    values: np.ndarray
    sample_rate: int
    frame_length: int
    hop_length: int
    length: int

    @property
    def n_frames(self) -> int:
        return self.values.shape[0]

    @property
    def n_mels(self) -> int:
        return self.values.shape[1]


def mel_filterbank(sample_rate: int, frame_length: int, n_mels: int) -> np.ndarray:
    """
    HTK Mel filterbank from 0 Hz to Nyquist, shape [n_mels, frame_length // 2 + 1].
    Triangles are unnormalized (peak weight 1).
    """
    n_bins = frame_length // 2 + 1
    if not 0 < n_mels < n_bins:
        raise TransformError(f"n_mels must be in (0, {n_bins}), got {n_mels}")
    return librosa.filters.mel(
        sr=sample_rate,
        n_fft=frame_length,
        n_mels=n_mels,
        fmin=0.0,
        fmax=sample_rate / 2.0,
        htk=True,
        norm=None,
        dtype=np.float64,
    )


def mel_pseudo_inverse(filterbank: np.ndarray) -> np.ndarray:
    """
    Transpose of the filterbank with each frequency row scaled so that a flat
    spectrum survives the round trip flat. Bins no filter reaches map to 0.
    """
    row_sums = filterbank.sum(axis=1)
    inverse = filterbank.T.copy()
    response = inverse @ row_sums
    reached = response > 0
    inverse[reached] /= response[reached, None]
    inverse[~reached] = 0.0
    return np.maximum(inverse, 0.0)


def mel_extract(x: AudioBuffer, n_mels: int, frame_length: int = 512,
                hop_length: int = 128) -> MelSpectrogram:
    """
    |STFT| -> Mel filterbank -> log(max(value, 1e-5)).

    Returns:
        MelSpectrogram with values of shape [n_frames, n_mels]
    """
    filterbank = mel_filterbank(x.sample_rate, frame_length, n_mels)
    magnitudes = stft(x, frame_length, hop_length).magnitude()
    mel = magnitudes @ filterbank.T
    return MelSpectrogram(
        values=np.log(np.maximum(mel, LOG_FLOOR)),
        sample_rate=x.sample_rate,
        frame_length=frame_length,
        hop_length=hop_length,
        length=len(x),
    )


def consistency_error(estimate: np.ndarray, target: np.ndarray) -> float:
    """
    Frobenius distance between two one-sided magnitude spectrograms, counted
    over the full two-sided spectrum (interior bins weigh twice).
    """
    weights = np.full(target.shape[1], 2.0)
    weights[0] = 1.0
    if target.shape[1] > 1:
        weights[-1] = 1.0
    return float(np.sqrt(np.sum(weights * (estimate - target) ** 2)))


def griffin_lim(magnitudes: np.ndarray, frame_length: int, hop_length: int,
                n_iter: int) -> Tuple[np.ndarray, List[float]]:
    """
    Griffin-Lim phase estimation from zero phase, in the padded signal domain.

    Args:
        magnitudes: Target one-sided magnitudes, shape [n_frames, n_bins]
        frame_length: STFT frame length
        hop_length: STFT hop length
        n_iter: Number of projection iterations

    Returns:
        (padded-domain signal, consistency error before each re-projection;
        n_iter + 1 values, the first for the zero-phase start)
    """
    signal = overlap_add(magnitudes.astype(np.complex128), frame_length, hop_length)
    errors = []
    for iteration in range(n_iter):
        spectrum = analyze(signal, frame_length, hop_length)
        errors.append(consistency_error(np.abs(spectrum), magnitudes))
        phase = np.exp(1j * np.angle(spectrum))
        signal = overlap_add(magnitudes * phase, frame_length, hop_length)
    errors.append(consistency_error(np.abs(analyze(signal, frame_length, hop_length)), magnitudes))
    logger.debug("Griffin-Lim finished", iterations=n_iter, first_error=errors[0], last_error=errors[-1])
    return signal, errors


def mel_invert(m: MelSpectrogram, griffin_lim_iters: int = 32,
               error_trace: Optional[List[float]] = None) -> AudioBuffer:
    """
    exp -> pseudo-inverse filterbank (clamped at 0) -> Griffin-Lim -> crop to original length.

    Args:
        m: Mel spectrogram from ``mel_extract``
        griffin_lim_iters: Phase estimation iterations
        error_trace: Optional list receiving the per-iteration consistency error

    Raises:
        TransformError: If the Mel geometry does not match its STFT parameters
    """
    expected_frames = n_frames_for(m.length, m.hop_length)
    if m.values.ndim != 2 or m.n_frames != expected_frames:
        raise TransformError(
            f"Mel geometry mismatch: {m.values.shape} frames for length {m.length} "
            f"(expected {expected_frames} frames)"
        )
    filterbank = mel_filterbank(m.sample_rate, m.frame_length, m.n_mels)
    magnitudes = np.maximum(np.exp(m.values) @ mel_pseudo_inverse(filterbank).T, 0.0)

    signal, errors = griffin_lim(magnitudes, m.frame_length, m.hop_length, griffin_lim_iters)
    if error_trace is not None:
        error_trace.extend(errors)

    half = m.frame_length // 2
    out = signal[half:half + m.length]
    if len(out) < m.length:
        out = np.pad(out, (0, m.length - len(out)))
    return AudioBuffer(out, m.sample_rate)


def mel_extract_invert(x: AudioBuffer, n_mels: int = 80, griffin_lim_iters: int = 32,
                       frame_length: int = 512, hop_length: int = 128) -> AudioBuffer:
    """The Mel extraction-inversion transform."""
    return mel_invert(mel_extract(x, n_mels, frame_length, hop_length), griffin_lim_iters)
