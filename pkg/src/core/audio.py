"""
Waveform representation, WAV I/O and STFT primitives shared by all transforms.

Samples are stored as float64 in [-1, 1] (16-bit PCM divided by 32768). PCM is
only an I/O boundary; everything in between runs in double precision.

STFT layout: the signal is reflect-padded by ``frame_length // 2`` at both
ends and zero-padded at the end so that ``n_frames = 1 + ceil(len / hop)``.
Frames are Hann-windowed (periodic) and transformed with a real FFT, giving
``frame_length // 2 + 1`` bins per frame.
"""

import io
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Union

import numpy as np
import soundfile as sf
import structlog
from scipy.io import wavfile
from scipy.signal import get_window

logger = structlog.get_logger("audio")

PCM_SCALE = 32768.0
DEFAULT_FRAME_LENGTH = 512
DEFAULT_HOP_LENGTH = 128

# libsndfile subtypes; scipy widens 24-bit PCM to int32, so the header is authoritative.
_SUBTYPE_BITS = {"PCM_S8": 8, "PCM_U8": 8, "PCM_16": 16, "PCM_24": 24, "PCM_32": 32, "FLOAT": 32, "DOUBLE": 64}


class AudioError(ValueError):
    """Invalid audio buffer or STFT geometry."""


class WavFormatError(AudioError):
    """WAV file could not be parsed."""

    def __init__(self, message: str, path: Optional[str] = None):
        super().__init__(message)
        self.path = path


class UnsupportedFormatError(WavFormatError):
    """WAV file parsed but uses a codec, channel count or bit depth we reject."""

    def __init__(self, message: str, field: str, value: object, path: Optional[str] = None):
        super().__init__(message, path)
        self.field = field
        self.value = value


@dataclass(frozen=True)
class AudioBuffer:
    """Mono waveform with its sample rate."""

    samples: np.ndarray
    sample_rate: int

    def __post_init__(self):
        samples = np.array(self.samples, dtype=np.float64).reshape(-1)
        if self.sample_rate is None or int(self.sample_rate) <= 0:
            raise AudioError(f"sample_rate must be positive, got {self.sample_rate}")
        if not np.all(np.isfinite(samples)):
            raise AudioError("samples must be finite")
        samples.setflags(write=False)
        object.__setattr__(self, "samples", samples)
        object.__setattr__(self, "sample_rate", int(self.sample_rate))

    def __len__(self) -> int:
        return self.samples.shape[0]

    @property
    def duration(self) -> float:
        return len(self) / self.sample_rate

    def with_samples(self, samples: np.ndarray) -> "AudioBuffer":
        """Return a buffer with the same sample rate and new samples."""
        return AudioBuffer(samples, self.sample_rate)

    def to_pcm16(self) -> np.ndarray:
        """Clamp to [-1, 1] and convert to int16 PCM."""
        scaled = np.round(np.clip(self.samples, -1.0, 1.0) * PCM_SCALE)
        return np.clip(scaled, -PCM_SCALE, PCM_SCALE - 1).astype(np.int16)

    @classmethod
    def from_pcm16(cls, pcm: np.ndarray, sample_rate: int) -> "AudioBuffer":
        return cls(np.asarray(pcm, dtype=np.float64) / PCM_SCALE, sample_rate)


@dataclass(frozen=True)
class Spectrogram:
    """Complex STFT frames, shape [n_frames, n_bins]."""

    frames: np.ndarray
    frame_length: int
    hop_length: int
    sample_rate: int
    length: Optional[int] = None
    window: str = field(default="hann")

    def __post_init__(self):
        frames = np.asarray(self.frames, dtype=np.complex128)
        if frames.ndim != 2:
            raise AudioError(f"spectrogram frames must be 2-D, got shape {frames.shape}")
        if frames.shape[1] != self.frame_length // 2 + 1:
            raise AudioError(
                f"inconsistent frame dimensions: {frames.shape[1]} bins for frame_length "
                f"{self.frame_length} (expected {self.frame_length // 2 + 1})"
            )
        object.__setattr__(self, "frames", frames)

    @property
    def n_frames(self) -> int:
        return self.frames.shape[0]

    @property
    def n_bins(self) -> int:
        return self.frames.shape[1]

    def magnitude(self) -> np.ndarray:
        return np.abs(self.frames)


def load_wav(path: Union[str, Path]) -> AudioBuffer:
    """
    Load a RIFF/WAVE 16-bit PCM mono file.

    Args:
        path: Path to the WAV file

    Returns:
        AudioBuffer with samples normalized by 1/32768

    Raises:
        WavFormatError: If the header is malformed
        UnsupportedFormatError: If the file is not 16-bit PCM mono
    """
    path = str(path)
    try:
        sample_rate, data = wavfile.read(path)
    except FileNotFoundError:
        raise
    except (ValueError, EOFError) as e:
        raise WavFormatError(f"Malformed WAV file {path}: {e}", path=path) from e

    if data.dtype != np.int16:
        raise UnsupportedFormatError(
            f"Unsupported sample format {data.dtype} in {path}: only 16-bit PCM is supported",
            field="bit_depth",
            value=_header_bit_depth(path, data),
            path=path,
        )
    if data.ndim != 1:
        raise UnsupportedFormatError(
            f"Unsupported channel count {data.shape[1]} in {path}: only mono is supported",
            field="channels",
            value=data.shape[1],
            path=path,
        )

    buffer = AudioBuffer.from_pcm16(data, sample_rate)
    logger.debug("WAV loaded", path=path, sample_rate=sample_rate, samples=len(buffer))
    return buffer


def _header_bit_depth(path: str, data: np.ndarray) -> int:
    """Bits per sample as declared in the file header, falling back to the decoded dtype."""
    try:
        subtype = sf.info(path).subtype
    except RuntimeError:
        subtype = None
    return _SUBTYPE_BITS.get(subtype, data.dtype.itemsize * 8)


def to_wav_bytes(buffer: AudioBuffer) -> bytes:
    """Serialize a buffer as 16-bit PCM WAV bytes (clamped)."""
    out = io.BytesIO()
    wavfile.write(out, buffer.sample_rate, buffer.to_pcm16())
    return out.getvalue()


def save_wav(buffer: AudioBuffer, path: Union[str, Path]) -> None:
    """
    Write a buffer as 16-bit PCM mono. Out-of-range samples are clamped.

    Raises:
        AudioError: If the buffer is empty
        OSError: On I/O failure
    """
    if len(buffer) == 0:
        raise AudioError("Refusing to write an empty buffer")
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    wavfile.write(str(path), buffer.sample_rate, buffer.to_pcm16())
    logger.debug("WAV saved", path=str(path), sample_rate=buffer.sample_rate, samples=len(buffer))


def hann_window(frame_length: int) -> np.ndarray:
    """Periodic Hann window (satisfies COLA for hop = frame/2, frame/4)."""
    return get_window("hann", frame_length, fftbins=True)


def _check_geometry(frame_length: int, hop_length: int) -> None:
    if frame_length <= 0 or frame_length & (frame_length - 1):
        raise AudioError(f"frame_length must be a power of two, got {frame_length}")
    if hop_length <= 0 or hop_length > frame_length:
        raise AudioError(f"hop_length must be in [1, frame_length], got {hop_length}")


def n_frames_for(length: int, hop_length: int) -> int:
    return 1 + math.ceil(length / hop_length)


def padded_length(n_frames: int, frame_length: int, hop_length: int) -> int:
    return (n_frames - 1) * hop_length + frame_length


def pad_signal(samples: np.ndarray, frame_length: int, hop_length: int) -> np.ndarray:
    """Reflect-pad by frame/2 on both sides, then zero-pad the tail to a whole frame count."""
    half = frame_length // 2
    padded = np.pad(samples, half, mode="reflect")
    target = padded_length(n_frames_for(len(samples), hop_length), frame_length, hop_length)
    return np.pad(padded, (0, target - len(padded)))


def frame_signal(samples: np.ndarray, frame_length: int, hop_length: int) -> np.ndarray:
    """Split an already padded signal into frames of shape [n_frames, frame_length]."""
    view = np.lib.stride_tricks.sliding_window_view(samples, frame_length)
    return view[::hop_length]


def analyze(padded: np.ndarray, frame_length: int, hop_length: int) -> np.ndarray:
    """Windowed real FFT of every frame of a padded signal."""
    frames = frame_signal(padded, frame_length, hop_length) * hann_window(frame_length)
    return np.fft.rfft(frames, axis=1)


def overlap_add(frames: np.ndarray, frame_length: int, hop_length: int) -> np.ndarray:
    """
    Least-squares inverse of ``analyze``: inverse FFT, window, overlap-add and
    divide by the summed squared window. Samples the window never reaches are 0.
    """
    n_frames = frames.shape[0]
    window = hann_window(frame_length)
    chunks = np.fft.irfft(frames, n=frame_length, axis=1) * window
    total = padded_length(n_frames, frame_length, hop_length)
    signal = np.zeros(total)
    norm = np.zeros(total)
    for i in range(n_frames):
        start = i * hop_length
        signal[start:start + frame_length] += chunks[i]
        norm[start:start + frame_length] += window ** 2
    covered = norm > 1e-10
    signal[covered] /= norm[covered]
    signal[~covered] = 0.0
    return signal


def stft(buffer: AudioBuffer, frame_length: int = DEFAULT_FRAME_LENGTH,
         hop_length: int = DEFAULT_HOP_LENGTH) -> Spectrogram:
    """
    Short-time Fourier transform with Hann window and reflect padding.

    Args:
        buffer: Input audio
        frame_length: FFT size, power of two
        hop_length: Frame advance, at most frame_length

    Returns:
        Spectrogram with ``1 + ceil(len / hop)`` frames
    """
    _check_geometry(frame_length, hop_length)
    if len(buffer) < 1:
        raise AudioError("stft needs at least one sample")
    padded = pad_signal(buffer.samples, frame_length, hop_length)
    return Spectrogram(
        frames=analyze(padded, frame_length, hop_length),
        frame_length=frame_length,
        hop_length=hop_length,
        sample_rate=buffer.sample_rate,
        length=len(buffer),
    )


def istft(spectrogram: Spectrogram, length: Optional[int] = None) -> AudioBuffer:
    """
    Inverse STFT by windowed overlap-add with squared-window normalization.

    The output is cropped to the original signal length when it is known
    (from ``length`` or the spectrogram), otherwise to the padded span minus
    the leading half frame.
    """
    frame_length = spectrogram.frame_length
    hop_length = spectrogram.hop_length
    _check_geometry(frame_length, hop_length)
    signal = overlap_add(spectrogram.frames, frame_length, hop_length)
    half = frame_length // 2
    if length is None:
        length = spectrogram.length
    if length is None:
        length = (spectrogram.n_frames - 1) * hop_length
    out = signal[half:half + length]
    if len(out) < length:
        out = np.pad(out, (0, length - len(out)))
    return AudioBuffer(out, spectrogram.sample_rate)
