"""
Corpus evaluation: score benign/adversarial pairs from a manifest, calibrate
the threshold, and report ROC/AUC, accuracy and mean CERs per attack label.
"""

import json
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional, Union

import numpy as np
import structlog
from pydantic import BaseModel, ConfigDict, Field

from core.audio import AudioError, load_wav
from core.logger import LoggerMixin
from metrics.detection import (
    EmptyClassError,
    RocCurve,
    calibrate_threshold,
    detection_accuracy,
    roc_auc,
    tpr_at_fpr,
)
from metrics.text import Transcript, cer
from transcription.base import BaseTranscriber, TranscriberSpec, TranscriptionError, create_transcriber
from transforms import TransformConfig, TransformError
from .detector import DetectionResult, Detector, check_threshold

ThresholdSource = Literal["calibration", "explicit", "preset", "evaluation"]


class ManifestRow(BaseModel):
    """One manifest line. Relative paths resolve against the manifest's directory."""

    model_config = ConfigDict(extra="ignore")

    id: str
    benign: Optional[str] = None
    adversarial: Optional[str] = None
    transcript: Optional[str] = None
    attack_label: str = Field(default="unlabeled")


def load_manifest(path: Union[str, Path]) -> List[ManifestRow]:
    """
    Read a JSONL manifest; blank lines are skipped.

    Raises:
        ValueError: On malformed lines or duplicate ids
    """
    path = Path(path)
    base_dir = path.parent
    rows, seen = [], set()
    with open(path, "r") as f:
        for line_number, line in enumerate(f, start=1):
            if not line.strip():
                continue
            try:
                row = ManifestRow.model_validate(json.loads(line))
            except (json.JSONDecodeError, ValueError) as e:
                raise ValueError(f"{path}:{line_number}: invalid manifest row: {e}") from e
            if row.id in seen:
                raise ValueError(f"{path}:{line_number}: duplicate id '{row.id}'")
            seen.add(row.id)
            resolved = {}
            for key in ("benign", "adversarial"):
                value = getattr(row, key)
                if value is not None and not Path(value).is_absolute():
                    resolved[key] = str(base_dir / value)
            rows.append(row.model_copy(update=resolved))
    return rows


@dataclass(frozen=True)
class RowFailure:
    """A manifest row excluded from the metrics."""

    id: str
    stage: str
    error: str
    details: Dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        data = {"id": self.id, "stage": self.stage, "error": self.error}
        if self.details:
            data["details"] = self.details
        return data


@dataclass(frozen=True)
class RowResult:
    """Both clips of one manifest row, plus CER(original transcript, C(g(adv)))."""

    id: str
    attack_label: str
    benign: Optional[DetectionResult]
    adversarial: Optional[DetectionResult]
    cer_orig_gadv: Optional[float]

    def with_threshold(self, threshold: float) -> "RowResult":
        return RowResult(
            id=self.id,
            attack_label=self.attack_label,
            benign=self.benign.with_threshold(threshold) if self.benign else None,
            adversarial=self.adversarial.with_threshold(threshold) if self.adversarial else None,
            cer_orig_gadv=self.cer_orig_gadv,
        )

    def to_dict(self, include_timings: bool = True) -> Dict[str, Any]:
        return {
            "id": self.id,
            "attack_label": self.attack_label,
            "benign": self.benign.to_dict(include_timings) if self.benign else None,
            "adversarial": self.adversarial.to_dict(include_timings) if self.adversarial else None,
            "cer_orig_gadv": self.cer_orig_gadv,
        }


@dataclass
class EvaluationReport:
    """Detector quality over one evaluation manifest."""

    transform: Dict[str, Any]
    transform_label: str
    rows: List[RowResult]
    failures: List[RowFailure]
    roc: RocCurve
    threshold: float
    threshold_source: ThresholdSource
    accuracy: float
    calibration_accuracy: Optional[float]
    tpr_at_fpr: Dict[str, float]
    mean_cer: Dict[str, Dict[str, float]]
    mean_timings_ms: Dict[str, float]

    @property
    def auc(self) -> float:
        return self.roc.auc

    def benign_scores(self) -> List[float]:
        return [r.benign.cer_x_gx for r in self.rows if r.benign is not None]

    def adversarial_scores(self) -> List[float]:
        return [r.adversarial.cer_x_gx for r in self.rows if r.adversarial is not None]

    def to_dict(self, include_timings: bool = True) -> Dict[str, Any]:
        data = {
            "transform": self.transform,
            "transform_label": self.transform_label,
            "auc": self.auc,
            "accuracy": self.accuracy,
            "threshold": self.threshold,
            "threshold_source": self.threshold_source,
            "calibration_accuracy": self.calibration_accuracy,
            "tpr_at_fpr": self.tpr_at_fpr,
            "mean_cer": self.mean_cer,
            "roc": self.roc.to_dict(),
            "rows": [r.to_dict(include_timings) for r in self.rows],
            "failures": [f.to_dict() for f in self.failures],
        }
        if include_timings:
            data["mean_timings_ms"] = self.mean_timings_ms
        return data


def _mean(values: List[float]) -> Optional[float]:
    return float(np.mean(values)) if values else None


class Evaluator(LoggerMixin):
    """Scores manifests with one detector configuration."""

    def __init__(self, g: TransformConfig, transcriber: Union[BaseTranscriber, TranscriberSpec],
                 jobs: int = 1, logger: Optional[structlog.stdlib.BoundLogger] = None):
        super().__init__("evaluation", logger)
        if jobs < 1:
            raise ValueError(f"jobs must be at least 1, got {jobs}")
        self.g = g
        self.transcriber = (transcriber if isinstance(transcriber, BaseTranscriber)
                            else create_transcriber(transcriber))
        # Threshold is applied after calibration; scoring only needs the CERs.
        self.detector = Detector(g, self.transcriber, threshold=0.5, logger=self.logger)
        self.jobs = jobs

    def _score_row(self, row: ManifestRow) -> Union[RowResult, RowFailure]:
        stage = "load"
        try:
            benign_result = adversarial_result = None
            cer_orig_gadv = None
            if row.benign is not None:
                benign = load_wav(row.benign)
                stage = "benign"
                benign_result = self.detector.detect(benign, row.id)
            if row.adversarial is not None:
                stage = "load"
                adversarial = load_wav(row.adversarial)
                stage = "adversarial"
                adversarial_result = self.detector.detect(adversarial, row.id)
                if row.transcript is not None:
                    original = Transcript(row.transcript)
                elif benign_result is not None:
                    original = Transcript(benign_result.transcript_x)
                else:
                    original = None
                if original is not None:
                    cer_orig_gadv = cer(original, Transcript(adversarial_result.transcript_gx))
        except TranscriptionError as e:
            self.log_row_result(row.id, False, error=str(e), stage=stage)
            return RowFailure(row.id, stage, str(e), e.to_dict())
        except (OSError, AudioError, TransformError) as e:
            self.log_row_result(row.id, False, error=str(e), stage=stage)
            return RowFailure(row.id, stage, f"{type(e).__name__}: {e}")

        self.log_row_result(
            row.id, True,
            benign_cer=benign_result.cer_x_gx if benign_result else None,
            adversarial_cer=adversarial_result.cer_x_gx if adversarial_result else None,
        )
        return RowResult(row.id, row.attack_label, benign_result, adversarial_result, cer_orig_gadv)

    def score_manifest(self, rows: List[ManifestRow]):
        """
        Score every row, in parallel when ``jobs > 1``.

        Returns:
            (successful RowResults, RowFailures), both in manifest order
        """
        if self.jobs > 1:
            with ThreadPoolExecutor(max_workers=self.jobs) as pool:
                outcomes = list(pool.map(self._score_row, rows))
        else:
            outcomes = [self._score_row(row) for row in rows]
        results = [o for o in outcomes if isinstance(o, RowResult)]
        failures = [o for o in outcomes if isinstance(o, RowFailure)]
        return results, failures

    @staticmethod
    def _class_scores(results: List[RowResult]):
        benign = [r.benign.cer_x_gx for r in results if r.benign is not None]
        adversarial = [r.adversarial.cer_x_gx for r in results if r.adversarial is not None]
        return benign, adversarial

    def calibrate(self, manifest: Union[str, Path, List[ManifestRow]]):
        """
        Score a calibration manifest and pick its best threshold.

        Returns:
            (threshold, accuracy, failures)
        """
        rows = manifest if isinstance(manifest, list) else load_manifest(manifest)
        results, failures = self.score_manifest(rows)
        threshold, accuracy = calibrate_threshold(*self._class_scores(results))
        self.logger.info("✅ Threshold calibrated", transform=self.g.label, threshold=threshold,
                         accuracy=round(accuracy, 4), rows=len(results), failures=len(failures))
        return threshold, accuracy, failures

    def evaluate(self, manifest: Union[str, Path, List[ManifestRow]],
                 calibration_manifest: Union[str, Path, List[ManifestRow], None] = None,
                 threshold: Optional[float] = None,
                 threshold_source: ThresholdSource = "explicit") -> EvaluationReport:
        """
        Evaluate the detector on a manifest.

        The threshold comes from the calibration manifest when one is given,
        otherwise from ``threshold``; with neither, it is calibrated on the
        evaluation manifest itself and flagged as such.

        Raises:
            EmptyClassError: If no benign or no adversarial clip was scored
        """
        if threshold is not None:
            check_threshold(threshold)
        start = time.perf_counter()
        rows = manifest if isinstance(manifest, list) else load_manifest(manifest)
        results, failures = self.score_manifest(rows)
        benign, adversarial = self._class_scores(results)
        if not adversarial:
            raise EmptyClassError("evaluation manifest has no scored adversarial clips", label="adversarial")
        if not benign:
            raise EmptyClassError("evaluation manifest has no scored benign clips", label="benign")

        calibration_accuracy = None
        if calibration_manifest is not None:
            calibration_rows = (calibration_manifest if isinstance(calibration_manifest, list)
                                else load_manifest(calibration_manifest))
            calibration_results, calibration_failures = self.score_manifest(calibration_rows)
            for failure in calibration_failures:
                self.logger.warning("Calibration row failed", id=failure.id, error=failure.error)
            threshold, calibration_accuracy = calibrate_threshold(*self._class_scores(calibration_results))
            threshold_source = "calibration"
        elif threshold is None:
            threshold, calibration_accuracy = calibrate_threshold(benign, adversarial)
            threshold_source = "evaluation"
            self.logger.warning("⚠️ No calibration manifest or threshold; calibrating on the evaluation set",
                                threshold=threshold)

        results = [r.with_threshold(threshold) for r in results]
        roc = roc_auc(benign, adversarial)
        report = EvaluationReport(
            transform=self.g.to_json_dict(),
            transform_label=self.g.label,
            rows=results,
            failures=failures,
            roc=roc,
            threshold=threshold,
            threshold_source=threshold_source,
            accuracy=detection_accuracy(benign, adversarial, threshold),
            calibration_accuracy=calibration_accuracy,
            tpr_at_fpr={"0.00": tpr_at_fpr(roc, 0.0), "0.05": tpr_at_fpr(roc, 0.05)},
            mean_cer=self._mean_cer(results),
            mean_timings_ms=self._mean_timings(results),
        )
        self.logger.info(
            "✅ Evaluation complete",
            transform=self.g.label,
            rows=len(results),
            failures=len(failures),
            auc=round(report.auc, 4),
            accuracy=round(report.accuracy, 4),
            threshold=threshold,
            threshold_source=threshold_source,
            duration_s=round(time.perf_counter() - start, 3),
        )
        return report

    @staticmethod
    def _mean_cer(results: List[RowResult]) -> Dict[str, Dict[str, float]]:
        """Mean CER(orig, g(orig)), CER(adv, g(adv)) and CER(orig, g(adv)) per attack label."""
        by_label: Dict[str, List[RowResult]] = {}
        for r in results:
            by_label.setdefault(r.attack_label, []).append(r)
        summary = {}
        for label in sorted(by_label):
            group = by_label[label]
            summary[label] = {
                "cer_orig_gorig": _mean([r.benign.cer_x_gx for r in group if r.benign]),
                "cer_adv_gadv": _mean([r.adversarial.cer_x_gx for r in group if r.adversarial]),
                "cer_orig_gadv": _mean([r.cer_orig_gadv for r in group if r.cer_orig_gadv is not None]),
            }
        return summary

    @staticmethod
    def _mean_timings(results: List[RowResult]) -> Dict[str, float]:
        timings = [d.timings for r in results for d in (r.benign, r.adversarial) if d is not None]
        return {
            "transform_ms": round(_mean([t.transform_ms for t in timings]) or 0.0, 3),
            "transcribe_x_ms": round(_mean([t.transcribe_x_ms for t in timings]) or 0.0, 3),
            "transcribe_gx_ms": round(_mean([t.transcribe_gx_ms for t in timings]) or 0.0, 3),
        }


def evaluate(manifest: Union[str, Path, List[ManifestRow]], g: TransformConfig,
             transcriber: Union[BaseTranscriber, TranscriberSpec],
             calibration_manifest: Union[str, Path, List[ManifestRow], None] = None,
             threshold: Optional[float] = None, threshold_source: ThresholdSource = "explicit",
             jobs: int = 1) -> EvaluationReport:
    """Evaluate ``g`` with ``transcriber`` on a manifest. See ``Evaluator.evaluate``."""
    return Evaluator(g, transcriber, jobs=jobs).evaluate(
        manifest, calibration_manifest, threshold, threshold_source
    )
