"""
Detector quality metrics: ROC curve, AUC, threshold calibration and accuracy.

Scores are CER values; the positive class is "adversarial". The ROC sweep
counts ``score >= threshold`` as positive (standard curve construction) while
the detector itself, and therefore calibration and accuracy, uses the strict
``score > threshold`` rule.
"""

from dataclasses import dataclass
from typing import Any, Dict, List, Sequence, Tuple

import numpy as np
from sklearn.metrics import auc, roc_curve

from .distortion import MetricError


class EmptyClassError(MetricError):
    """One of the two score classes is empty."""

    def __init__(self, message: str, label: str):
        super().__init__(message)
        self.label = label


@dataclass(frozen=True)
class RocCurve:
    """ROC points sorted by FPR, from (0, 0) to (1, 1), and their trapezoidal area."""

    fpr: Tuple[float, ...]
    tpr: Tuple[float, ...]
    thresholds: Tuple[float, ...]
    auc: float

    @property
    def points(self) -> List[Tuple[float, float]]:
        return list(zip(self.fpr, self.tpr))

    def to_dict(self) -> Dict[str, Any]:
        return {
            "auc": self.auc,
            "points": [[f, t] for f, t in self.points],
            # The first sweep threshold is +inf; JSON has no infinity.
            "thresholds": [t if np.isfinite(t) else None for t in self.thresholds],
        }


def _check_classes(benign_scores: Sequence[float], adv_scores: Sequence[float]) -> Tuple[np.ndarray, np.ndarray]:
    benign = np.asarray(benign_scores, dtype=np.float64).reshape(-1)
    adversarial = np.asarray(adv_scores, dtype=np.float64).reshape(-1)
    if benign.size == 0:
        raise EmptyClassError("benign score list is empty", label="benign")
    if adversarial.size == 0:
        raise EmptyClassError("adversarial score list is empty", label="adversarial")
    return benign, adversarial


def roc_auc(benign_scores: Sequence[float], adv_scores: Sequence[float]) -> RocCurve:
    """
    ROC curve over every distinct score, adversarial as the positive class.

    Raises:
        EmptyClassError: If either list is empty
    """
    benign, adversarial = _check_classes(benign_scores, adv_scores)
    labels = np.concatenate([np.zeros(benign.size), np.ones(adversarial.size)])
    scores = np.concatenate([benign, adversarial])
    fpr, tpr, thresholds = roc_curve(labels, scores, drop_intermediate=False)
    return RocCurve(
        fpr=tuple(float(v) for v in fpr),
        tpr=tuple(float(v) for v in tpr),
        thresholds=tuple(float(v) for v in thresholds),
        auc=float(auc(fpr, tpr)),
    )


def detection_accuracy(benign_scores: Sequence[float], adv_scores: Sequence[float], threshold: float) -> float:
    """(TP + TN) / (P + N) with verdict ``score > threshold``."""
    benign, adversarial = _check_classes(benign_scores, adv_scores)
    correct = int(np.sum(benign <= threshold)) + int(np.sum(adversarial > threshold))
    return correct / (benign.size + adversarial.size)


def calibrate_threshold(benign_scores: Sequence[float], adv_scores: Sequence[float]) -> Tuple[float, float]:
    """
    Pick the threshold with the best detection accuracy.

    Candidates are the midpoints between consecutive distinct score levels
    (0 is always a level) plus the highest level itself, so that "everything
    benign" is also a candidate. Ties go to the smaller threshold.

    Returns:
        (threshold, accuracy)
    """
    benign, adversarial = _check_classes(benign_scores, adv_scores)
    levels = np.unique(np.concatenate([benign, adversarial, [0.0]]))
    candidates = np.concatenate([(levels[:-1] + levels[1:]) / 2.0, levels[-1:]])

    best_t, best_acc = float(candidates[-1]), -1.0
    for t in np.sort(candidates):
        acc = detection_accuracy(benign, adversarial, float(t))
        if acc > best_acc:
            best_t, best_acc = float(t), acc
    return best_t, best_acc


def tpr_at_fpr(roc: RocCurve, max_fpr: float) -> float:
    """Highest true-positive rate reachable with false-positive rate <= max_fpr."""
    best = 0.0
    for f, t in roc.points:
        if f <= max_fpr + 1e-12:
            best = max(best, t)
    return best
