"""
Compression-level search: detector AUC across values of one transform's main
hyper-parameter.
"""

from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Union

import structlog

from transcription.base import BaseTranscriber, TranscriberSpec, create_transcriber
from transforms import TransformConfig, parse_transform
from .evaluation import Evaluator, ManifestRow, load_manifest

logger = structlog.get_logger("detector.sweep")

SWEEP_PARAMETERS = {
    "quantize": "bits",
    "resample": "intermediate_rate",
    "shelf_filter": "gain_db",
    "mel_invert": "n_mels",
    "lpc": "order",
}


@dataclass(frozen=True)
class SweepPoint:
    parameter: str
    value: float
    transform: Dict[str, Any]
    auc: float
    accuracy: float
    threshold: float
    failures: int

    def to_dict(self) -> Dict[str, Any]:
        return {
            "parameter": self.parameter,
            "value": self.value,
            "transform": self.transform,
            "auc": self.auc,
            "accuracy": self.accuracy,
            "threshold": self.threshold,
            "failures": self.failures,
        }


def sweep_hyperparameter(family: str, values: Sequence[float],
                         manifest: Union[str, Path, List[ManifestRow]],
                         transcriber: Union[BaseTranscriber, TranscriberSpec],
                         calibration_manifest: Union[str, Path, List[ManifestRow], None] = None,
                         base: Optional[Dict[str, Any]] = None, jobs: int = 1) -> List[SweepPoint]:
    """
    Evaluate the detector once per parameter value.

    Args:
        family: Transform type tag (quantize, resample, shelf_filter, mel_invert, lpc)
        values: Values for the family's swept parameter
        manifest: Evaluation manifest
        transcriber: Transcriber instance or spec
        calibration_manifest: Optional calibration manifest; otherwise each point
            is calibrated on the evaluation manifest
        base: Other transform parameters held fixed
        jobs: Parallel rows per evaluation

    Returns:
        One SweepPoint per value, in the given order
    """
    if family not in SWEEP_PARAMETERS:
        raise ValueError(f"Cannot sweep '{family}'. Supported: {', '.join(sorted(SWEEP_PARAMETERS))}")
    if not values:
        raise ValueError("sweep needs at least one value")

    parameter = SWEEP_PARAMETERS[family]
    rows = manifest if isinstance(manifest, list) else load_manifest(manifest)
    calibration_rows = None
    if calibration_manifest is not None:
        calibration_rows = (calibration_manifest if isinstance(calibration_manifest, list)
                            else load_manifest(calibration_manifest))
    if not isinstance(transcriber, BaseTranscriber):
        transcriber = create_transcriber(transcriber)

    points = []
    for value in values:
        g: TransformConfig = parse_transform({**(base or {}), "type": family, parameter: value})
        report = Evaluator(g, transcriber, jobs=jobs).evaluate(rows, calibration_rows)
        points.append(SweepPoint(
            parameter=parameter,
            value=value,
            transform=g.to_json_dict(),
            auc=report.auc,
            accuracy=report.accuracy,
            threshold=report.threshold,
            failures=len(report.failures),
        ))
        logger.info("Sweep point", transform=g.label, auc=round(report.auc, 4))
    return points
