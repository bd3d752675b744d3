"""Adaptive attack harness against a toy differentiable transcriber."""

from .adaptive import AttackConfig, AttackResult, AttackState, IterationRecord, adaptive_attack
from .ctc import BLANK, CtcResult, ctc_loss, greedy_decode
from .fixtures import attack_fixtures, speech_like
from .sweep import RobustnessReport, RobustnessRow, robustness_sweep
from .toy_model import ToyAcousticModel, ToyModelTranscriber, toy_forward

__all__ = [
    "AttackConfig",
    "AttackResult",
    "AttackState",
    "IterationRecord",
    "adaptive_attack",
    "BLANK",
    "CtcResult",
    "ctc_loss",
    "greedy_decode",
    "attack_fixtures",
    "speech_like",
    "RobustnessReport",
    "RobustnessRow",
    "robustness_sweep",
    "ToyAcousticModel",
    "ToyModelTranscriber",
    "toy_forward",
]
