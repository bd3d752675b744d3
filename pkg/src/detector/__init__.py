"""Detection rule, corpus evaluation, timing bench and parameter sweeps."""

from .detector import DetectionResult, Detector, Timings, detect, verdict_for
from .evaluation import (
    EvaluationReport,
    Evaluator,
    ManifestRow,
    RowFailure,
    RowResult,
    evaluate,
    load_manifest,
)
from .sweep import SweepPoint, sweep_hyperparameter
from .timing import TimingResult, bench_presets, clips_from_manifest, timing_bench

__all__ = [
    "Detector",
    "DetectionResult",
    "Timings",
    "detect",
    "verdict_for",
    "Evaluator",
    "EvaluationReport",
    "ManifestRow",
    "RowFailure",
    "RowResult",
    "evaluate",
    "load_manifest",
    "SweepPoint",
    "sweep_hyperparameter",
    "TimingResult",
    "timing_bench",
    "bench_presets",
    "clips_from_manifest",
]
