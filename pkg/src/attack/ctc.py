"""
CTC loss and its gradient by the forward-backward algorithm in log space.

Label 0 is the blank; target symbols are 1..A. Logits are unnormalized,
shape [T, A + 1]; the loss is ``-log p(target | logits)`` summed over all
blank-augmented alignments.
"""

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from numba import njit
from scipy.special import log_softmax, softmax

BLANK = 0


@dataclass(frozen=True)
class CtcResult:
    """Loss, gradient w.r.t. the logits, and whether the target fits in T frames."""

    loss: float
    grad: np.ndarray
    feasible: bool


def min_frames(target: Sequence[int]) -> int:
    """Fewest frames that can emit ``target``: one per symbol plus a blank between repeats."""
    target = list(target)
    repeats = sum(1 for a, b in zip(target, target[1:]) if a == b)
    return len(target) + repeats


@njit(cache=True)
def _logaddexp(a, b):
    if a == -np.inf:
        return b
    if b == -np.inf:
        return a
    if a > b:
        return a + math.log1p(math.exp(b - a))
    return b + math.log1p(math.exp(a - b))


@njit(cache=True)
def _forward_backward(log_probs, extended):
    n_frames = log_probs.shape[0]
    n_states = extended.shape[0]
    alpha = np.full((n_frames, n_states), -np.inf)
    beta = np.full((n_frames, n_states), -np.inf)

    alpha[0, 0] = log_probs[0, extended[0]]
    if n_states > 1:
        alpha[0, 1] = log_probs[0, extended[1]]
    for t in range(1, n_frames):
        for s in range(n_states):
            total = alpha[t - 1, s]
            if s >= 1:
                total = _logaddexp(total, alpha[t - 1, s - 1])
            if s >= 2 and extended[s] != 0 and extended[s] != extended[s - 2]:
                total = _logaddexp(total, alpha[t - 1, s - 2])
            if total != -np.inf:
                alpha[t, s] = total + log_probs[t, extended[s]]

    # beta[t, s] excludes the emission at t.
    beta[n_frames - 1, n_states - 1] = 0.0
    if n_states > 1:
        beta[n_frames - 1, n_states - 2] = 0.0
    for t in range(n_frames - 2, -1, -1):
        for s in range(n_states):
            total = beta[t + 1, s] + log_probs[t + 1, extended[s]]
            if s + 1 < n_states:
                total = _logaddexp(total, beta[t + 1, s + 1] + log_probs[t + 1, extended[s + 1]])
            if s + 2 < n_states and extended[s + 2] != 0 and extended[s + 2] != extended[s]:
                total = _logaddexp(total, beta[t + 1, s + 2] + log_probs[t + 1, extended[s + 2]])
            beta[t, s] = total

    log_likelihood = alpha[n_frames - 1, n_states - 1]
    if n_states > 1:
        log_likelihood = _logaddexp(log_likelihood, alpha[n_frames - 1, n_states - 2])

    occupancy = np.zeros(log_probs.shape)
    for t in range(n_frames):
        for s in range(n_states):
            gamma = alpha[t, s] + beta[t, s]
            if gamma != -np.inf:
                occupancy[t, extended[s]] += math.exp(gamma - log_likelihood)
    return log_likelihood, occupancy


def extend_target(target: Sequence[int]) -> np.ndarray:
    """Interleave blanks: [b, y1, b, y2, ..., yL, b]."""
    extended = np.zeros(2 * len(target) + 1, dtype=np.int64)
    extended[1::2] = np.asarray(target, dtype=np.int64)
    return extended


def ctc_loss(logits: np.ndarray, target: Sequence[int]) -> CtcResult:
    """
    Negative log-likelihood of ``target`` under CTC and its gradient.

    Args:
        logits: Unnormalized scores, shape [T, A + 1], blank at index 0
        target: Symbol indices in 1..A

    Returns:
        CtcResult; an infeasible target (too long for T) gives an infinite
        loss, a zero gradient and ``feasible=False``
    """
    logits = np.asarray(logits, dtype=np.float64)
    if logits.ndim != 2:
        raise ValueError(f"logits must be [T, A+1], got shape {logits.shape}")
    target = [int(v) for v in target]
    if any(v <= BLANK or v >= logits.shape[1] for v in target):
        raise ValueError(f"target symbols must be in [1, {logits.shape[1] - 1}]")

    n_frames = logits.shape[0]
    if n_frames == 0 or min_frames(target) > n_frames:
        return CtcResult(float("inf"), np.zeros_like(logits), False)

    log_probs = log_softmax(logits, axis=1)
    log_likelihood, occupancy = _forward_backward(log_probs, extend_target(target))
    if not np.isfinite(log_likelihood):
        return CtcResult(float("inf"), np.zeros_like(logits), False)
    grad = softmax(logits, axis=1) - occupancy
    return CtcResult(float(-log_likelihood), grad, True)


def greedy_decode(logits: np.ndarray) -> list:
    """Best-path decode: argmax per frame, collapse repeats, drop blanks."""
    best = np.argmax(np.asarray(logits), axis=1)
    symbols, previous = [], None
    for symbol in best.tolist():
        if symbol != previous and symbol != BLANK:
            symbols.append(symbol)
        previous = symbol
    return symbols
