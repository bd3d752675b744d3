"""Tests for transcript, distortion and detection metrics."""

import numpy as np
import pytest

from core.audio import AudioBuffer
from metrics import (
    EmptyClassError,
    MetricError,
    SilentSignalError,
    Transcript,
    calibrate_threshold,
    cer,
    db,
    db_relative,
    detection_accuracy,
    edit_distance,
    linf,
    roc_auc,
    tpr_at_fpr,
)


def reference_distance(a: str, b: str) -> int:
    table = [[0] * (len(b) + 1) for _ in range(len(a) + 1)]
    for i in range(len(a) + 1):
        table[i][0] = i
    for j in range(len(b) + 1):
        table[0][j] = j
    for i in range(1, len(a) + 1):
        for j in range(1, len(b) + 1):
            table[i][j] = min(
                table[i - 1][j] + 1,
                table[i][j - 1] + 1,
                table[i - 1][j - 1] + (a[i - 1] != b[j - 1]),
            )
    return table[len(a)][len(b)]


def pair_counting_auc(benign, adversarial) -> float:
    wins = 0.0
    for a in adversarial:
        for b in benign:
            wins += 1.0 if a > b else 0.5 if a == b else 0.0
    return wins / (len(benign) * len(adversarial))


class TestTranscript:
    def test_normalizes(self):
        assert Transcript("  Hello \t  WORLD \n") == "hello world"

    def test_is_idempotent(self):
        once = Transcript(" A  b ")
        assert Transcript(once) == once == Transcript(str(once))

    def test_none_is_empty(self):
        assert Transcript(None) == ""


class TestEditDistance:
    def test_known_values(self):
        assert edit_distance("kitten", "sitting") == 3
        assert edit_distance("", "abc") == 3
        assert edit_distance("abc", "abc") == 0

    def test_matches_reference_on_random_pairs(self):
        rng = np.random.default_rng(0)
        alphabet = list("ab c")
        for _ in range(1000):
            a = "".join(rng.choice(alphabet, size=rng.integers(0, 9)))
            b = "".join(rng.choice(alphabet, size=rng.integers(0, 9)))
            assert edit_distance(a, b) == reference_distance(a, b)

    def test_cer(self):
        assert cer("", "") == 0.0
        assert cer("abc", "") == 1.0
        assert cer("kitten", "sitting") == pytest.approx(3 / 7)

    def test_cer_is_symmetric_and_bounded(self):
        rng = np.random.default_rng(1)
        for _ in range(200):
            a = "".join(rng.choice(list("xyz "), size=rng.integers(0, 12)))
            b = "".join(rng.choice(list("xyz "), size=rng.integers(0, 12)))
            assert cer(a, b) == cer(b, a)
            assert 0.0 <= cer(a, b) <= 1.0


class TestDistortion:
    def test_linf_in_integer_units(self):
        x = np.zeros(10)
        y = x.copy()
        y[3] = 100 / 32768
        assert linf(x, y) == pytest.approx(100.0)
        assert linf(AudioBuffer(x, 16000), AudioBuffer(y, 16000)) == pytest.approx(100.0)

    def test_linf_rejects_length_mismatch(self):
        with pytest.raises(MetricError):
            linf(np.zeros(3), np.zeros(4))

    def test_db_of_half_scale(self):
        assert db(np.array([0.0, -0.5, 0.25])) == pytest.approx(20 * np.log10(16384))

    def test_db_of_silence(self):
        with pytest.raises(SilentSignalError):
            db(np.zeros(8))

    def test_relative_loudness(self):
        x = np.array([0.5, -0.2])
        assert db_relative(x, 0.1 * x) == pytest.approx(-20.0)


class TestRoc:
    def test_matches_pair_counting(self):
        rng = np.random.default_rng(0)
        for _ in range(100):
            benign = np.round(rng.uniform(0, 1, size=rng.integers(1, 30)), 1)
            adversarial = np.round(rng.uniform(0, 1, size=rng.integers(1, 30)), 1)
            assert roc_auc(benign, adversarial).auc == pytest.approx(
                pair_counting_auc(benign, adversarial), abs=1e-9
            )

    @pytest.mark.parametrize("transform", [np.exp, lambda s: s ** 3, lambda s: 5.0 * s - 2.0])
    def test_invariant_under_monotone_rescoring(self, transform):
        rng = np.random.default_rng(1)
        benign = np.round(rng.uniform(0, 1, size=25), 1)
        adversarial = np.round(rng.uniform(0.2, 1, size=25), 1)
        assert roc_auc(transform(benign), transform(adversarial)).auc == pytest.approx(
            roc_auc(benign, adversarial).auc, abs=1e-12
        )

    def test_separable_scores(self):
        roc = roc_auc([0.0, 0.1, 0.05], [0.8, 0.9])
        assert roc.auc == 1.0
        assert roc.points[0] == (0.0, 0.0)
        assert roc.points[-1] == (1.0, 1.0)

    def test_to_dict_is_json_safe(self):
        data = roc_auc([0.1], [0.9]).to_dict()
        assert data["thresholds"][0] is None
        assert all(t is not None for t in data["thresholds"][1:])

    @pytest.mark.parametrize("benign,adversarial,label", [([], [0.5], "benign"), ([0.5], [], "adversarial")])
    def test_empty_class(self, benign, adversarial, label):
        with pytest.raises(EmptyClassError) as info:
            roc_auc(benign, adversarial)
        assert info.value.label == label

    def test_tpr_at_fpr(self):
        roc = roc_auc([0.1, 0.2], [0.15, 0.3])
        assert tpr_at_fpr(roc, 0.0) == 0.5
        assert tpr_at_fpr(roc, 0.5) == 1.0


class TestCalibration:
    def test_separable(self):
        threshold, accuracy = calibrate_threshold([0.0, 0.1], [0.5, 0.9])
        assert threshold == pytest.approx(0.3)
        assert accuracy == 1.0

    def test_ties_go_to_smaller_threshold(self):
        threshold, accuracy = calibrate_threshold([0.0, 0.5], [0.5])
        assert threshold == pytest.approx(0.25)
        assert accuracy == pytest.approx(2 / 3)

    def test_all_zero_scores(self):
        threshold, accuracy = calibrate_threshold([0.0, 0.0], [0.0])
        assert threshold == 0.0
        assert accuracy == pytest.approx(2 / 3)

    def test_accuracy_uses_strict_rule(self):
        assert detection_accuracy([0.5], [0.5], 0.5) == 0.5
        assert detection_accuracy([0.5], [0.6], 0.5) == 1.0

    def test_calibrated_threshold_is_optimal(self):
        rng = np.random.default_rng(3)
        benign = rng.uniform(0.0, 0.6, size=40)
        adversarial = rng.uniform(0.3, 1.0, size=40)
        threshold, accuracy = calibrate_threshold(benign, adversarial)
        assert detection_accuracy(benign, adversarial, threshold) == accuracy
        for t in np.linspace(0, 1, 101):
            assert detection_accuracy(benign, adversarial, t) <= accuracy
