"""
Adaptive attack against a transform-based detector.

The attacker wants both ``x + delta`` and ``g(x + delta)`` to transcribe as the
target, so the loss is ``c |delta|^2 + c1 l(x + delta) + c2 l(g(x + delta))``
with ``l`` the CTC loss. The g-term gradient uses the straight-through
estimator: the forward pass runs the exact transform, the backward pass treats
it as the identity. Steps are signed gradients of size alpha; the perturbation
is kept in an L-inf ball of radius epsilon that shrinks by ``rescale_factor``
after every success.

The optimized variable is clipped to epsilon and the applied perturbation is
``rescale * clip(variable)``. This is a deliberate reading of the
rescale-after-clip update: the rescale multiplies an unscaled variable instead
of being folded back into delta, so a success shrinks the applied bound once
rather than compounding on every later iteration. Either way
``|delta|_inf <= rescale * epsilon`` holds after every step.
"""

from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
import structlog
from pydantic import BaseModel, ConfigDict, Field

from core.audio import PCM_SCALE, AudioBuffer
from transforms import IdentityConfig, TransformConfig, apply
from .toy_model import ToyAcousticModel

logger = structlog.get_logger("attack.adaptive")


class AttackConfig(BaseModel):
    """
    Attack hyper-parameters. ``epsilon`` and ``alpha`` are in 16-bit integer units.
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    target: str
    epsilon: float = Field(default=500.0, ge=0)
    alpha: float = Field(default=10.0, gt=0)
    max_iters: int = Field(default=500, ge=0)
    c: float = Field(default=0.0, ge=0)
    c1: float = Field(default=1.0, ge=0)
    c2: float = Field(default=1.0, ge=0)
    rescale_factor: float = Field(default=0.8, gt=0, lt=1)
    log_every: int = Field(default=50, gt=0)


@dataclass(frozen=True)
class IterationRecord:
    iteration: int
    loss: float
    linf: float
    rescale: float
    success: bool

    def to_dict(self) -> Dict[str, Any]:
        return {
            "iteration": self.iteration,
            "loss": self.loss,
            "linf": self.linf,
            "rescale": self.rescale,
            "success": self.success,
        }


@dataclass
class AttackState:
    """Mutable state of one attack run."""

    variable: np.ndarray
    delta: np.ndarray
    best_delta: Optional[np.ndarray] = None
    rescale: float = 1.0
    trace: List[IterationRecord] = field(default_factory=list)

    @property
    def succeeded(self) -> bool:
        return self.best_delta is not None


@dataclass(frozen=True)
class AttackResult:
    x_adv: AudioBuffer
    delta: np.ndarray
    succeeded: bool
    trace: Tuple[IterationRecord, ...]

    @property
    def linf(self) -> float:
        return float(np.max(np.abs(self.delta), initial=0.0) * PCM_SCALE)


def _combined_loss(model: ToyAcousticModel, x: np.ndarray, delta: np.ndarray, target: List[int],
                   g: TransformConfig, cfg: AttackConfig, sample_rate: int):
    """Loss and straight-through gradient w.r.t. the applied perturbation."""
    perturbed = x + delta
    loss = cfg.c * float(np.dot(delta, delta))
    grad = 2.0 * cfg.c * delta
    if cfg.c1 > 0:
        result, grad_x = model.loss_and_grad(perturbed, target)
        loss += cfg.c1 * result.loss
        grad = grad + cfg.c1 * grad_x
    if cfg.c2 > 0:
        transformed = apply(g, AudioBuffer(perturbed, sample_rate)).samples
        result, grad_gx = model.loss_and_grad(transformed, target)
        loss += cfg.c2 * result.loss
        grad = grad + cfg.c2 * grad_gx
    return loss, grad


def adaptive_attack(x: AudioBuffer, target: str, g: Optional[TransformConfig],
                    model: ToyAcousticModel, cfg: AttackConfig) -> AttackResult:
    """
    Run the adaptive attack.

    Args:
        x: Clean clip
        target: Target transcript tau
        g: Transform the detector uses (None means identity)
        model: Victim model
        cfg: Attack hyper-parameters

    Returns:
        AttackResult with ``x + best_delta`` (or the final perturbation if no
        iteration succeeded) and the per-iteration trace
    """
    g = g or IdentityConfig()
    symbols = model.encode(target)
    epsilon = cfg.epsilon / PCM_SCALE
    alpha = cfg.alpha / PCM_SCALE
    samples = x.samples
    state = AttackState(variable=np.zeros(len(x)), delta=np.zeros(len(x)))

    for iteration in range(1, cfg.max_iters + 1):
        loss, grad = _combined_loss(model, samples, state.delta, symbols, g, cfg, x.sample_rate)
        # d(applied)/d(variable) = rescale > 0, so the sign is unchanged.
        state.variable = np.clip(state.variable - alpha * np.sign(grad), -epsilon, epsilon)
        applied_rescale = state.rescale
        state.delta = applied_rescale * state.variable

        perturbed = samples + state.delta
        transcript = model.transcribe(perturbed)
        success = False
        if transcript == target:
            transformed = apply(g, AudioBuffer(perturbed, x.sample_rate)).samples
            success = model.transcribe(transformed) == target
        if success:
            state.best_delta = state.delta.copy()
            state.rescale *= cfg.rescale_factor

        record = IterationRecord(
            iteration=iteration,
            loss=float(loss),
            linf=float(np.max(np.abs(state.delta), initial=0.0) * PCM_SCALE),
            rescale=applied_rescale,
            success=success,
        )
        state.trace.append(record)
        if iteration % cfg.log_every == 0 or success:
            logger.debug("Attack iteration", iteration=iteration, loss=round(record.loss, 4),
                         linf=round(record.linf, 2), rescale=applied_rescale, success=success)

    delta = state.best_delta if state.best_delta is not None else state.delta
    logger.debug("Attack finished", target=target, transform=g.type, succeeded=state.succeeded,
                 iterations=cfg.max_iters)
    return AttackResult(
        x_adv=x.with_samples(samples + delta),
        delta=delta,
        succeeded=state.succeeded,
        trace=tuple(state.trace),
    )
