"""Shared fixtures: synthetic clips, WAV writers and mock-transcriber corpora."""

import json
import os
import sys

import numpy as np
import pytest

sys.path.insert(0, os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), "src"))

from attack.fixtures import speech_like  # noqa: E402
from core.audio import AudioBuffer, load_wav, save_wav  # noqa: E402
from transcription.mock import mock_garble, script_entry  # noqa: E402
from transforms import apply  # noqa: E402

SAMPLE_RATE = 16000

WORDS = [
    "open", "the", "door", "turn", "off", "lights", "call", "mom", "play", "music",
    "set", "an", "alarm", "for", "seven", "send", "message", "to", "my", "friend",
    "what", "time", "is", "it",
]


def phrase(rng: np.random.Generator, n_words: int) -> str:
    return " ".join(str(w) for w in rng.choice(WORDS, size=n_words))


@pytest.fixture
def speech():
    return speech_like(1.0, SAMPLE_RATE, seed=0)


@pytest.fixture
def tone():
    def make(freq: float, duration_s: float = 1.0, sample_rate: int = SAMPLE_RATE,
             amplitude: float = 0.5) -> AudioBuffer:
        t = np.arange(int(duration_s * sample_rate)) / sample_rate
        return AudioBuffer(amplitude * np.sin(2 * np.pi * freq * t), sample_rate)
    return make


@pytest.fixture
def noise():
    def make(duration_s: float = 1.0, sample_rate: int = SAMPLE_RATE, amplitude: float = 0.1,
             seed: int = 0) -> AudioBuffer:
        rng = np.random.default_rng(seed)
        return AudioBuffer(amplitude * rng.standard_normal(int(duration_s * sample_rate)), sample_rate)
    return make


@pytest.fixture
def wav_writer(tmp_path):
    def write(buffer: AudioBuffer, name: str = "clip.wav") -> str:
        path = tmp_path / name
        save_wav(buffer, path)
        return str(path)
    return write


@pytest.fixture
def level_clip():
    """
    Clip whose 64 ms frames sit exactly on the given dB levels: an alternating
    +/-a sequence has RMS a, so the mock ladder is ``level / 2`` per frame.
    """
    def make(levels_db, sample_rate: int = SAMPLE_RATE) -> AudioBuffer:
        frame = int(round(sample_rate * 0.064))
        sign = np.where(np.arange(frame) % 2 == 0, 1.0, -1.0)
        samples = np.concatenate([10.0 ** (level / 20.0) * sign for level in levels_db])
        return AudioBuffer(samples, sample_rate)
    return make


@pytest.fixture
def mock_corpus(tmp_path):
    """
    Build a benign/adversarial corpus on disk plus the mock script for it.

    Every clip is scripted with its transcript, and every transformed clip
    with a garbled transcript: benign ones at ``benign_severity``, adversarial
    ones at ``adversarial_severity``. Clips are scripted as loaded from disk so
    fingerprints match what the evaluator sees.

    Returns:
        build(transforms, n_pairs, name, seed, ...) -> (manifest path, entries)
    """
    def build(transforms, n_pairs: int = 100, name: str = "eval", seed: int = 0,
              benign_severity: float = 0.05, adversarial_severity: float = 0.8,
              duration_s: float = 0.5):
        root = tmp_path / name
        root.mkdir()
        rng = np.random.default_rng(seed)
        entries, rows = {}, []
        for i in range(n_pairs):
            row_id = f"{name}-{i:03d}"
            original = phrase(rng, 6)
            target = phrase(rng, 4)
            files = {}
            for offset, kind, text, severity in ((0, "benign", original, benign_severity),
                                                 (1, "adversarial", target, adversarial_severity)):
                clip_seed = seed * 100000 + 2 * i + offset
                path = root / f"{row_id}-{kind}.wav"
                save_wav(speech_like(duration_s, SAMPLE_RATE, seed=clip_seed), path)
                clip = load_wav(path)
                key, entry = script_entry(clip, text)
                assert key not in entries, "fingerprint collision between synthetic clips"
                entries[key] = entry
                for j, g in enumerate(transforms):
                    garbled = mock_garble(text, severity, seed=clip_seed * 31 + j)
                    g_key, g_entry = script_entry(apply(g, clip), garbled)
                    assert g_key != key, "transform left the clip fingerprint unchanged"
                    entries.setdefault(g_key, g_entry)
                files[kind] = path.name
            rows.append({
                "id": row_id,
                "benign": files["benign"],
                "adversarial": files["adversarial"],
                "transcript": original,
                "attack_label": "synthetic",
            })
        manifest = root / "manifest.jsonl"
        manifest.write_text("".join(json.dumps(row) + "\n" for row in rows))
        return manifest, entries
    return build
