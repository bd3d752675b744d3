"""Tests for the CTC loss against brute-force alignment enumeration."""

import itertools

import numpy as np
import pytest
from scipy.special import log_softmax

from attack.ctc import BLANK, ctc_loss, extend_target, greedy_decode, min_frames


def collapse(path):
    out, previous = [], None
    for symbol in path:
        if symbol != previous and symbol != BLANK:
            out.append(symbol)
        previous = symbol
    return out


def brute_force_probability(logits, target) -> float:
    log_probs = log_softmax(logits, axis=1)
    total = 0.0
    n_frames, n_classes = logits.shape
    for path in itertools.product(range(n_classes), repeat=n_frames):
        if collapse(path) == list(target):
            total += np.exp(sum(log_probs[t, s] for t, s in enumerate(path)))
    return total


class TestCtcLoss:
    def test_matches_enumeration(self):
        rng = np.random.default_rng(0)
        for n_frames in range(1, 6):
            for alphabet_size in range(1, 4):
                logits = rng.standard_normal((n_frames, alphabet_size + 1)) * 2.0
                for length in range(0, 4):
                    for target in itertools.product(range(1, alphabet_size + 1), repeat=length):
                        result = ctc_loss(logits, target)
                        probability = brute_force_probability(logits, target)
                        if probability == 0.0:
                            assert not result.feasible
                            assert result.loss == float("inf")
                            assert not np.any(result.grad)
                        else:
                            assert result.feasible
                            assert result.loss == pytest.approx(-np.log(probability), abs=1e-6)

    def test_gradient_matches_finite_differences(self):
        rng = np.random.default_rng(1)
        eps = 1e-5
        for _ in range(50):
            n_frames = int(rng.integers(3, 7))
            n_classes = int(rng.integers(3, 5))
            target = rng.integers(1, n_classes, size=int(rng.integers(1, 3))).tolist()
            if min_frames(target) > n_frames:
                continue
            logits = rng.standard_normal((n_frames, n_classes))
            grad = ctc_loss(logits, target).grad
            numeric = np.zeros_like(logits)
            for index in np.ndindex(logits.shape):
                up, down = logits.copy(), logits.copy()
                up[index] += eps
                down[index] -= eps
                numeric[index] = (ctc_loss(up, target).loss - ctc_loss(down, target).loss) / (2 * eps)
            np.testing.assert_allclose(grad, numeric, rtol=1e-4, atol=1e-6)

    def test_gradient_rows_sum_to_zero(self):
        rng = np.random.default_rng(2)
        result = ctc_loss(rng.standard_normal((8, 4)), [1, 2, 2, 3])
        np.testing.assert_allclose(result.grad.sum(axis=1), 0.0, atol=1e-12)

    def test_infeasible_target(self):
        result = ctc_loss(np.zeros((2, 3)), [1, 1])
        assert min_frames([1, 1]) == 3
        assert not result.feasible
        assert result.loss == float("inf")
        assert result.grad.shape == (2, 3)
        assert not np.any(result.grad)

    def test_rejects_blank_in_target(self):
        with pytest.raises(ValueError):
            ctc_loss(np.zeros((4, 3)), [0, 1])

    def test_rejects_symbol_outside_alphabet(self):
        with pytest.raises(ValueError):
            ctc_loss(np.zeros((4, 3)), [3])


class TestDecoding:
    def test_extend_target(self):
        assert extend_target([2, 2]).tolist() == [0, 2, 0, 2, 0]

    def test_greedy_decode_collapses(self):
        logits = np.full((7, 3), -5.0)
        for t, symbol in enumerate([1, 1, 0, 1, 2, 2, 0]):
            logits[t, symbol] = 5.0
        assert greedy_decode(logits) == [1, 1, 2]
