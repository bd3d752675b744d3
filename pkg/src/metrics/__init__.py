"""Text, distortion and detector-quality metrics."""

from .detection import (
    EmptyClassError,
    RocCurve,
    calibrate_threshold,
    detection_accuracy,
    roc_auc,
    tpr_at_fpr,
)
from .distortion import MetricError, SilentSignalError, db, db_relative, l2, linf
from .text import Transcript, cer, edit_distance, normalize_text

__all__ = [
    "Transcript",
    "normalize_text",
    "edit_distance",
    "cer",
    "linf",
    "l2",
    "db",
    "db_relative",
    "RocCurve",
    "roc_auc",
    "calibrate_threshold",
    "detection_accuracy",
    "tpr_at_fpr",
    "MetricError",
    "EmptyClassError",
    "SilentSignalError",
]
