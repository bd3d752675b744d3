"""
The detection rule: ``x`` is adversarial iff ``CER(C(x), C(g(x))) > t``.
"""

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Any, Dict, Literal, Optional, Union

import structlog

from core.audio import AudioBuffer
from core.logger import LoggerMixin
from metrics.text import Transcript, cer
from transcription.base import BaseTranscriber, TranscriberSpec, create_transcriber
from transforms import TransformConfig, apply

Verdict = Literal["adversarial", "benign"]


def verdict_for(score: float, threshold: float) -> Verdict:
    return "adversarial" if score > threshold else "benign"


@dataclass(frozen=True)
class Timings:
    """Wall-clock milliseconds spent per stage of one detection."""

    transform_ms: float = 0.0
    transcribe_x_ms: float = 0.0
    transcribe_gx_ms: float = 0.0

    def to_dict(self) -> Dict[str, float]:
        return {k: round(v, 3) for k, v in asdict(self).items()}


@dataclass(frozen=True)
class DetectionResult:
    """Outcome of the detector on one clip."""

    cer_x_gx: float
    verdict: Verdict
    threshold: float
    transcript_x: str
    transcript_gx: str
    timings: Timings = field(default_factory=Timings)
    example_id: Optional[str] = None

    def with_threshold(self, threshold: float) -> "DetectionResult":
        """Same scores, verdict recomputed at ``threshold``."""
        return DetectionResult(
            cer_x_gx=self.cer_x_gx,
            verdict=verdict_for(self.cer_x_gx, threshold),
            threshold=threshold,
            transcript_x=self.transcript_x,
            transcript_gx=self.transcript_gx,
            timings=self.timings,
            example_id=self.example_id,
        )

    def to_dict(self, include_timings: bool = True) -> Dict[str, Any]:
        data = {
            "id": self.example_id,
            "cer": self.cer_x_gx,
            "verdict": self.verdict,
            "threshold": self.threshold,
            "transcript_x": self.transcript_x,
            "transcript_gx": self.transcript_gx,
        }
        if include_timings:
            data["timings"] = self.timings.to_dict()
        return data


def check_threshold(threshold: float):
    if not 0.0 <= threshold <= 1.0:
        raise ValueError(f"threshold must be in [0, 1], got {threshold}")


class Detector(LoggerMixin):
    """Transform plus transcriber; scores clips and applies the threshold rule."""

    def __init__(self, g: TransformConfig, transcriber: Union[BaseTranscriber, TranscriberSpec],
                 threshold: float = 0.5, concurrent: bool = False,
                 logger: Optional[structlog.stdlib.BoundLogger] = None):
        """
        Args:
            g: Input transformation
            transcriber: Transcriber instance, or a spec to build one from
            threshold: Decision threshold t in [0, 1]
            concurrent: Transcribe x and g(x) on two threads
            logger: Optional logger instance
        """
        super().__init__("detector", logger)
        check_threshold(threshold)
        self.g = g
        self.transcriber = (transcriber if isinstance(transcriber, BaseTranscriber)
                            else create_transcriber(transcriber))
        self.threshold = threshold
        self.concurrent = concurrent

    def _timed_transcribe(self, x: AudioBuffer, example_id: Optional[str]):
        start = time.perf_counter()
        text = self.transcriber.transcribe(x, example_id)
        return text, (time.perf_counter() - start) * 1000.0

    def detect(self, x: AudioBuffer, example_id: Optional[str] = None) -> DetectionResult:
        """
        Score one clip.

        Raises:
            TranscriptionError: If either transcription fails, tagged with ``example_id``
        """
        start = time.perf_counter()
        gx = apply(self.g, x)
        transform_ms = (time.perf_counter() - start) * 1000.0

        if self.concurrent:
            with ThreadPoolExecutor(max_workers=2) as pool:
                future_x = pool.submit(self._timed_transcribe, x, example_id)
                future_gx = pool.submit(self._timed_transcribe, gx, example_id)
                text_x, x_ms = future_x.result()
                text_gx, gx_ms = future_gx.result()
        else:
            text_x, x_ms = self._timed_transcribe(x, example_id)
            text_gx, gx_ms = self._timed_transcribe(gx, example_id)

        score = cer(Transcript(text_x), Transcript(text_gx))
        result = DetectionResult(
            cer_x_gx=score,
            verdict=verdict_for(score, self.threshold),
            threshold=self.threshold,
            transcript_x=text_x,
            transcript_gx=text_gx,
            timings=Timings(transform_ms, x_ms, gx_ms),
            example_id=example_id,
        )
        self.logger.debug("Detection", id=example_id, cer=round(score, 4), verdict=result.verdict)
        return result


def detect(x: AudioBuffer, g: TransformConfig, transcriber: Union[BaseTranscriber, TranscriberSpec],
           t: float, example_id: Optional[str] = None) -> DetectionResult:
    """
    Run the detector once.

    Args:
        x: Clip to classify
        g: Input transformation
        transcriber: Transcriber instance or spec
        t: Threshold in [0, 1]
        example_id: Optional id attached to results and failures

    Returns:
        DetectionResult with verdict ``adversarial`` iff cer > t
    """
    return Detector(g, transcriber, t).detect(x, example_id)
