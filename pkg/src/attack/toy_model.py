"""
A small affine acoustic model standing in for a victim ASR.

Frames of the raw waveform map to logits through ``W @ frame + b``, so the
gradient of any loss on the logits w.r.t. the samples is exact and closed
form: frame gradients ``G @ W`` overlap-added back onto the waveform.
"""

from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np
import structlog

from core.audio import AudioBuffer
from metrics.text import Transcript
from transcription.base import BaseTranscriber
from .ctc import BLANK, CtcResult, ctc_loss, greedy_decode


@dataclass(frozen=True)
class ToyAcousticModel:
    """
    Affine frame classifier over ``alphabet`` plus a blank at logit index 0.

    Attributes:
        weights: Shape [len(alphabet) + 1, frame_length]
        bias: Shape [len(alphabet) + 1]
        alphabet: Symbols for logit indices 1..A
        frame_length: Samples per frame
        hop_length: Frame advance
    """

    weights: np.ndarray
    bias: np.ndarray
    alphabet: str
    frame_length: int = 32
    hop_length: int = 32

    def __post_init__(self):
        n_classes = len(self.alphabet) + 1
        if len(set(self.alphabet)) != len(self.alphabet):
            raise ValueError("alphabet symbols must be unique")
        if self.weights.shape != (n_classes, self.frame_length):
            raise ValueError(f"weights must be [{n_classes}, {self.frame_length}], got {self.weights.shape}")
        if self.bias.shape != (n_classes,):
            raise ValueError(f"bias must have {n_classes} entries, got {self.bias.shape}")
        if not 0 < self.hop_length <= self.frame_length:
            raise ValueError("hop_length must be in [1, frame_length]")

    @classmethod
    def random(cls, alphabet: str = "abcde", frame_length: int = 32, hop_length: int = 32,
               weight_scale: float = 20.0, blank_bias: float = 2.0, seed: int = 0) -> "ToyAcousticModel":
        """Gaussian weights with standard deviation ``weight_scale``; only the blank has a bias."""
        rng = np.random.default_rng(seed)
        weights = rng.standard_normal((len(alphabet) + 1, frame_length)) * weight_scale
        bias = np.zeros(len(alphabet) + 1)
        bias[BLANK] = blank_bias
        return cls(weights, bias, alphabet, frame_length, hop_length)

    @property
    def n_classes(self) -> int:
        return len(self.alphabet) + 1

    def n_frames(self, n_samples: int) -> int:
        if n_samples <= self.frame_length:
            return 1
        return 1 + int(np.ceil((n_samples - self.frame_length) / self.hop_length))

    def frames(self, samples: np.ndarray) -> np.ndarray:
        """[T, frame_length] frames; the tail is zero-padded."""
        n_frames = self.n_frames(len(samples))
        padded = np.zeros((n_frames - 1) * self.hop_length + self.frame_length)
        padded[:len(samples)] = samples
        view = np.lib.stride_tricks.sliding_window_view(padded, self.frame_length)
        return view[::self.hop_length]

    def logits(self, samples: np.ndarray) -> np.ndarray:
        return self.frames(samples) @ self.weights.T + self.bias

    def encode(self, text: str) -> list:
        """Symbol indices (1..A) of a transcript."""
        missing = sorted(set(text) - set(self.alphabet))
        if missing:
            raise ValueError(f"symbols {missing} are not in the model alphabet '{self.alphabet}'")
        return [self.alphabet.index(c) + 1 for c in text]

    def decode(self, symbols: Sequence[int]) -> str:
        return "".join(self.alphabet[s - 1] for s in symbols)

    def transcribe(self, samples: np.ndarray) -> str:
        return self.decode(greedy_decode(self.logits(samples)))

    def samples_grad(self, grad_logits: np.ndarray, n_samples: int) -> np.ndarray:
        """Back-propagate a logit gradient [T, A+1] onto the waveform samples."""
        frame_grads = grad_logits @ self.weights
        n_frames = frame_grads.shape[0]
        out = np.zeros((n_frames - 1) * self.hop_length + self.frame_length)
        for t in range(n_frames):
            start = t * self.hop_length
            out[start:start + self.frame_length] += frame_grads[t]
        return out[:n_samples]

    def loss_and_grad(self, samples: np.ndarray, target: Sequence[int]) -> Tuple[CtcResult, np.ndarray]:
        """CTC loss of ``target`` on ``samples`` and its gradient w.r.t. the samples."""
        result = ctc_loss(self.logits(samples), target)
        return result, self.samples_grad(result.grad, len(samples))


def toy_forward(model: ToyAcousticModel, x: AudioBuffer) -> Tuple[np.ndarray, Transcript]:
    """Logits [T, A+1] and best-path transcript of ``x``."""
    logits = model.logits(x.samples)
    return logits, Transcript(model.decode(greedy_decode(logits)))


class ToyModelTranscriber(BaseTranscriber):
    """Transcriber backed by a ToyAcousticModel (no external process)."""

    backend = "toy"

    def __init__(self, model: ToyAcousticModel, logger: Optional[structlog.stdlib.BoundLogger] = None):
        super().__init__(None, logger)
        self.model = model

    def describe(self) -> str:
        return f"toy[{self.model.alphabet}]"

    def _transcribe(self, x: AudioBuffer) -> str:
        return self.model.transcribe(x.samples)
