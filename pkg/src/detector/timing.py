"""
Wall-clock cost of each transformation, single-threaded.
"""

import time
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Sequence, Union

import numpy as np
import structlog

from core.audio import AudioBuffer, load_wav
from transforms import TransformConfig, apply
from .evaluation import ManifestRow, load_manifest

logger = structlog.get_logger("detector.timing")


@dataclass(frozen=True)
class TimingResult:
    """Mean transform-only time over a set of clips."""

    name: str
    label: str
    mean_seconds: float
    n_clips: int
    mean_clip_seconds: float

    def to_dict(self) -> Dict[str, object]:
        return {
            "name": self.name,
            "label": self.label,
            "mean_seconds": self.mean_seconds,
            "n_clips": self.n_clips,
            "mean_clip_seconds": self.mean_clip_seconds,
        }


def clips_from_manifest(manifest: Union[str, Path, List[ManifestRow]]) -> List[AudioBuffer]:
    """Every benign and adversarial clip referenced by a manifest, in order."""
    rows = manifest if isinstance(manifest, list) else load_manifest(manifest)
    clips = []
    for row in rows:
        for path in (row.benign, row.adversarial):
            if path is not None:
                clips.append(load_wav(path))
    return clips


def timing_bench(clips: Union[str, Path, Sequence[AudioBuffer]], g: TransformConfig,
                 name: str = "") -> TimingResult:
    """
    Mean seconds spent in ``apply(g, clip)`` per clip.

    Raises:
        ValueError: If there are no clips
    """
    if isinstance(clips, (str, Path)):
        clips = clips_from_manifest(clips)
    if not clips:
        raise ValueError("timing bench needs at least one clip")

    durations = []
    for clip in clips:
        start = time.perf_counter()
        apply(g, clip)
        durations.append(time.perf_counter() - start)

    result = TimingResult(
        name=name or g.type,
        label=g.label,
        mean_seconds=float(np.mean(durations)),
        n_clips=len(clips),
        mean_clip_seconds=float(np.mean([c.duration for c in clips])),
    )
    logger.info("⏱️ Timing bench", transform=result.label, mean_s=round(result.mean_seconds, 4),
                clips=result.n_clips)
    return result


def bench_presets(clips: Sequence[AudioBuffer], transforms: Dict[str, TransformConfig]) -> List[TimingResult]:
    """Bench every named transform on the same clips."""
    return [timing_bench(clips, g, name=name) for name, g in transforms.items()]
