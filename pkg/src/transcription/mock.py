"""
Deterministic mock transcriber for closed-loop tests.

A clip's fingerprint is its frame-RMS ladder: RMS in dB per non-overlapping
frame, quantized to ``step_db`` levels, then hashed. Perturbations that move
no frame across a level boundary keep the fingerprint (benign robustness);
larger distortion misses the script, and the miss is answered by garbling the
transcript of the nearest scripted clip. "Nearest" and the garble severity both
use the energy-ladder distance: mean absolute per-frame level difference in dB.
No spectral feature enters the lookup.
"""

import hashlib
import math
from typing import Iterable, Optional, Tuple

import numpy as np
import structlog

from core.audio import AudioBuffer
from metrics.text import Transcript
from .base import BaseTranscriber, MockEntry, MockSpec, TranscriptionError

# Substitutes are drawn from characters that never survive normalization
# differently and are unlikely to occur in transcripts.
_FOREIGN = "#*@%&$~^+=0123456789"


def energy_ladder(x: AudioBuffer, frame_ms: float = 64.0, step_db: float = 2.0,
                  floor_db: float = -80.0) -> Tuple[int, ...]:
    """Quantized per-frame RMS level in dB (full scale = 0 dB)."""
    frame = max(int(round(x.sample_rate * frame_ms / 1000.0)), 1)
    n_frames = max(math.ceil(len(x) / frame), 1)
    padded = np.zeros(n_frames * frame)
    padded[:len(x)] = x.samples
    rms = np.sqrt(np.mean(padded.reshape(n_frames, frame) ** 2, axis=1))
    level_db = np.maximum(20.0 * np.log10(np.maximum(rms, 1e-12)), floor_db)
    return tuple(int(v) for v in np.round(level_db / step_db))


def ladder_key(ladder: Iterable[int]) -> str:
    payload = ",".join(str(v) for v in ladder).encode("ascii")
    return hashlib.sha1(payload).hexdigest()[:16]


def fingerprint(x: AudioBuffer, spec: Optional[MockSpec] = None) -> str:
    """Hash of the clip's energy ladder, framed and quantized as ``spec`` says."""
    spec = spec or MockSpec()
    return ladder_key(energy_ladder(x, spec.frame_ms, spec.step_db, spec.floor_db))


def mock_garble(base: str, severity: float, seed: int) -> Transcript:
    """
    Edit ``ceil(severity * len(base))`` distinct positions of ``base``.

    Each edit either deletes a character or substitutes a character that does
    not occur in ``base``, so the edit distance to ``base`` equals the number of
    edits. Spaces are only ever substituted and deletions never leave a
    leading, trailing or doubled space, so the result is already normalized.
    """
    base = Transcript(base)
    severity = min(max(float(severity), 0.0), 1.0)
    n_edits = math.ceil(severity * len(base))
    if n_edits == 0:
        return base

    rng = np.random.default_rng(seed)
    positions = set(rng.choice(len(base), size=n_edits, replace=False).tolist())
    foreign = [c for c in _FOREIGN if c not in base] or ["_"]

    out = []
    for i, char in enumerate(base):
        if i not in positions:
            out.append(char)
            continue
        left_space = not out or out[-1] == " "
        right_space = i + 1 >= len(base) or base[i + 1] == " "
        can_delete = char != " " and not (left_space and right_space)
        if can_delete and rng.random() < 0.5:
            continue
        out.append(foreign[int(rng.integers(len(foreign)))])
    return Transcript("".join(out))


def script_entry(x: AudioBuffer, transcript: str, severity: Optional[float] = None,
                 spec: Optional[MockSpec] = None) -> Tuple[str, MockEntry]:
    """(fingerprint, entry) scripting ``transcript`` for clip ``x``."""
    spec = spec or MockSpec()
    ladder = energy_ladder(x, spec.frame_ms, spec.step_db, spec.floor_db)
    return ladder_key(ladder), MockEntry(ladder=list(ladder), transcript=Transcript(transcript), severity=severity)


class MockTranscriber(BaseTranscriber):
    """Looks clips up in a fingerprint script; a pure function of (spec, audio)."""

    backend = "mock"

    def __init__(self, spec: MockSpec, logger: Optional[structlog.stdlib.BoundLogger] = None):
        super().__init__(spec, logger)

    def describe(self) -> str:
        return f"mock[{len(self.spec.entries)} entries]"

    def _nearest(self, ladder: Tuple[int, ...]) -> Tuple[Optional[str], float]:
        """Closest scripted entry by mean absolute level difference in dB."""
        best_key, best_distance = None, math.inf
        levels = np.asarray(ladder, dtype=np.float64)
        for key in sorted(self.spec.entries):
            entry = self.spec.entries[key]
            if len(entry.ladder) != len(ladder):
                continue
            distance = float(np.mean(np.abs(np.asarray(entry.ladder) - levels))) * self.spec.step_db
            if distance < best_distance:
                best_key, best_distance = key, distance
        return best_key, best_distance

    def _transcribe(self, x: AudioBuffer) -> str:
        ladder = energy_ladder(x, self.spec.frame_ms, self.spec.step_db, self.spec.floor_db)
        key = ladder_key(ladder)
        if key in self.spec.entries:
            return self.spec.entries[key].transcript

        if self.spec.fallback == "error":
            raise TranscriptionError(f"No scripted transcript for fingerprint {key}", backend=self.backend)
        nearest, distance = self._nearest(ladder)
        if self.spec.fallback == "empty" or nearest is None:
            return ""

        entry = self.spec.entries[nearest]
        severity = entry.severity
        if severity is None:
            severity = min(1.0, distance / self.spec.garble_scale_db)
        self.logger.debug("Mock miss", fingerprint=key, nearest=nearest,
                          distance_db=round(distance, 3), severity=severity)
        return mock_garble(entry.transcript, severity, seed=int(key[:8], 16))
