"""
Robustness of a transform under adaptive attack, across perturbation bounds.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence

import numpy as np
import structlog

from core.audio import AudioBuffer
from detector.detector import Detector
from metrics.detection import detection_accuracy, roc_auc
from metrics.distortion import SilentSignalError, db_relative
from metrics.text import cer
from transforms import IdentityConfig, TransformConfig, apply
from .adaptive import AttackConfig, AttackResult, adaptive_attack
from .toy_model import ToyAcousticModel, ToyModelTranscriber

logger = structlog.get_logger("attack.sweep")


@dataclass(frozen=True)
class RobustnessRow:
    """One perturbation bound: distortion, attack success and detector quality."""

    epsilon: float
    mean_linf: float
    mean_db: Optional[float]
    sr_x_adv: float
    sr_g_x_adv: float
    cer_x_adv_target: float
    cer_g_x_adv_target: float
    auc: float
    accuracy: float
    threshold: float

    def to_dict(self) -> Dict[str, Any]:
        return {
            "epsilon": self.epsilon,
            "mean_linf": self.mean_linf,
            "mean_db": self.mean_db,
            "sr_x_adv": self.sr_x_adv,
            "sr_g_x_adv": self.sr_g_x_adv,
            "cer_x_adv_target": self.cer_x_adv_target,
            "cer_g_x_adv_target": self.cer_g_x_adv_target,
            "auc": self.auc,
            "accuracy": self.accuracy,
            "threshold": self.threshold,
        }


@dataclass
class RobustnessReport:
    transform: Dict[str, Any]
    transform_label: str
    target: str
    rows: List[RobustnessRow]
    monotonicity_violations: List[Dict[str, float]] = field(default_factory=list)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "transform": self.transform,
            "transform_label": self.transform_label,
            "target": self.target,
            "rows": [r.to_dict() for r in self.rows],
            "monotonicity_violations": self.monotonicity_violations,
        }


def _attack_all(fixtures: Sequence[AudioBuffer], target: str, g: TransformConfig,
                model: ToyAcousticModel, cfg: AttackConfig, jobs: int) -> List[AttackResult]:
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(lambda x: adaptive_attack(x, target, g, model, cfg), fixtures))
    return [adaptive_attack(x, target, g, model, cfg) for x in fixtures]


def robustness_sweep(g: Optional[TransformConfig], epsilons: Sequence[float], fixtures: Sequence[AudioBuffer],
                     model: ToyAcousticModel, target: str, base_config: Optional[AttackConfig] = None,
                     threshold: float = 0.5, jobs: int = 1) -> RobustnessReport:
    """
    Attack every fixture at every epsilon and score the detector on the results.

    The detector uses the toy model as its transcriber. Its benign class is the
    clean fixtures, its adversarial class the attacked ones.

    Args:
        g: Transform under test (None means identity)
        epsilons: Initial L-inf bounds, integer units
        fixtures: Clean clips
        model: Victim model
        target: Target transcript
        base_config: Attack settings other than epsilon and target
        threshold: Fixed detection threshold for the accuracy column
        jobs: Parallel attacks

    Returns:
        RobustnessReport with one row per epsilon; decreases of SR(g(x_adv))
        along increasing epsilon are listed, not raised
    """
    if not epsilons:
        raise ValueError("sweep needs at least one epsilon")
    if not fixtures:
        raise ValueError("sweep needs at least one fixture")
    g = g or IdentityConfig()
    base_config = base_config or AttackConfig(target=target)
    detector = Detector(g, ToyModelTranscriber(model), threshold=threshold)
    benign_scores = [detector.detect(x).cer_x_gx for x in fixtures]

    rows = []
    for epsilon in epsilons:
        cfg = base_config.model_copy(update={"epsilon": float(epsilon), "target": target})
        results = _attack_all(fixtures, target, g, model, cfg, jobs)

        transcripts = [model.transcribe(r.x_adv.samples) for r in results]
        transformed = [model.transcribe(apply(g, r.x_adv).samples) for r in results]
        db_values = []
        for x, r in zip(fixtures, results):
            try:
                db_values.append(db_relative(x, r.delta))
            except SilentSignalError:
                continue
        adversarial_scores = [detector.detect(r.x_adv).cer_x_gx for r in results]

        row = RobustnessRow(
            epsilon=float(epsilon),
            mean_linf=float(np.mean([r.linf for r in results])),
            mean_db=float(np.mean(db_values)) if db_values else None,
            sr_x_adv=float(np.mean([t == target for t in transcripts])),
            sr_g_x_adv=float(np.mean([t == target for t in transformed])),
            cer_x_adv_target=float(np.mean([cer(t, target) for t in transcripts])),
            cer_g_x_adv_target=float(np.mean([cer(t, target) for t in transformed])),
            auc=roc_auc(benign_scores, adversarial_scores).auc,
            accuracy=detection_accuracy(benign_scores, adversarial_scores, threshold),
            threshold=threshold,
        )
        rows.append(row)
        logger.info("Robustness row", transform=g.label, epsilon=row.epsilon, sr_x_adv=row.sr_x_adv,
                    sr_g_x_adv=row.sr_g_x_adv, auc=round(row.auc, 4))

    violations = []
    for previous, current in zip(rows, rows[1:]):
        if current.sr_g_x_adv < previous.sr_g_x_adv:
            violations.append({
                "epsilon": current.epsilon,
                "previous_epsilon": previous.epsilon,
                "sr_g_x_adv": current.sr_g_x_adv,
                "previous_sr_g_x_adv": previous.sr_g_x_adv,
            })
    if violations:
        logger.warning("⚠️ SR(g(x_adv)) decreased with a larger bound", violations=len(violations))

    return RobustnessReport(
        transform=g.to_json_dict(),
        transform_label=g.label,
        target=target,
        rows=rows,
        monotonicity_violations=violations,
    )
