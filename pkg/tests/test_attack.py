"""Tests for the toy victim model, the adaptive attack and the robustness sweep."""

import numpy as np
import pytest
from pydantic import ValidationError

from attack import (
    AttackConfig,
    ToyAcousticModel,
    ToyModelTranscriber,
    adaptive_attack,
    attack_fixtures,
    robustness_sweep,
    toy_forward,
)
from core.audio import AudioBuffer
from transforms import IdentityConfig, QuantizeConfig, ShelfFilterConfig


@pytest.fixture(scope="module")
def model():
    return ToyAcousticModel.random("abcde", seed=0)


class TestToyModel:
    def test_pattern_rows_give_known_transcript(self):
        frame_length = 8
        weights = np.zeros((3, frame_length))
        weights[1, 0] = 10.0  # 'a' fires on a positive first sample
        weights[2, 1] = 10.0  # 'b' fires on a positive second sample
        bias = np.array([1.0, 0.0, 0.0])
        toy = ToyAcousticModel(weights, bias, "ab", frame_length, frame_length)

        samples = np.zeros(4 * frame_length)
        samples[0] = 1.0
        samples[2 * frame_length + 1] = 1.0
        assert toy.transcribe(samples) == "ab"
        logits, transcript = toy_forward(toy, AudioBuffer(samples, 16000))
        assert logits.shape == (4, 3)
        assert transcript == "ab"
        assert ToyModelTranscriber(toy).transcribe(AudioBuffer(samples, 16000)) == "ab"

    def test_rejects_bad_shapes(self):
        with pytest.raises(ValueError):
            ToyAcousticModel(np.zeros((2, 8)), np.zeros(3), "ab", 8, 8)
        with pytest.raises(ValueError):
            ToyAcousticModel(np.zeros((3, 8)), np.zeros(3), "aa", 8, 8)

    def test_encode_rejects_unknown_symbols(self, model):
        assert model.encode("abc") == [1, 2, 3]
        with pytest.raises(ValueError):
            model.encode("xyz")

    def test_samples_grad_matches_finite_differences(self):
        toy = ToyAcousticModel.random("abc", frame_length=8, hop_length=4, weight_scale=1.0, seed=3)
        rng = np.random.default_rng(0)
        samples = rng.standard_normal(30) * 0.3
        target = [1, 2]
        _, grad = toy.loss_and_grad(samples, target)

        eps = 1e-6
        numeric = np.zeros_like(samples)
        for i in range(len(samples)):
            up, down = samples.copy(), samples.copy()
            up[i] += eps
            down[i] -= eps
            numeric[i] = (toy.loss_and_grad(up, target)[0].loss - toy.loss_and_grad(down, target)[0].loss) / (2 * eps)
        np.testing.assert_allclose(grad, numeric, rtol=1e-4, atol=1e-6)


class TestAdaptiveAttack:
    def test_identity_closed_loop(self, model):
        fixtures = attack_fixtures(20)
        cfg = AttackConfig(target="abc", epsilon=2000, alpha=10, max_iters=500)
        results = [adaptive_attack(x, "abc", None, model, cfg) for x in fixtures]

        reached = [model.transcribe(r.x_adv.samples) == "abc" for r in results]
        assert sum(reached) >= 18
        for r in results:
            for record in r.trace:
                assert record.linf <= record.rescale * cfg.epsilon + 1e-6
            if r.succeeded:
                assert r.linf < cfg.epsilon

    @pytest.mark.parametrize("g", [QuantizeConfig(bits=8), ShelfFilterConfig()], ids=lambda g: g.type)
    def test_straight_through_halves_final_loss(self, model, g):
        x = attack_fixtures(1, seed=7)[0]
        cfg = AttackConfig(target="abc", epsilon=2000, alpha=10, max_iters=500)
        result = adaptive_attack(x, "abc", g, model, cfg)
        assert len(result.trace) == 500
        assert result.trace[-1].loss <= 0.5 * result.trace[0].loss

    def test_is_deterministic(self, model):
        x = attack_fixtures(1, seed=11)[0]
        cfg = AttackConfig(target="ab", epsilon=1000, max_iters=50)
        first = adaptive_attack(x, "ab", IdentityConfig(), model, cfg)
        second = adaptive_attack(x, "ab", IdentityConfig(), model, cfg)
        np.testing.assert_array_equal(first.delta, second.delta)
        assert first.trace == second.trace

    def test_zero_iterations_leaves_input(self, model):
        x = attack_fixtures(1)[0]
        result = adaptive_attack(x, "abc", None, model, AttackConfig(target="abc", max_iters=0))
        assert result.trace == ()
        assert not result.succeeded
        assert result.linf == 0.0

    @pytest.mark.parametrize("factor", [0.0, 1.0])
    def test_rescale_factor_must_shrink(self, factor):
        with pytest.raises(ValidationError):
            AttackConfig(target="abc", rescale_factor=factor)

    def test_rejects_target_outside_alphabet(self, model):
        with pytest.raises(ValueError):
            adaptive_attack(attack_fixtures(1)[0], "xyz", None, model, AttackConfig(target="xyz", max_iters=1))


class TestRobustnessSweep:
    def test_rows_per_epsilon(self, model):
        base = AttackConfig(target="abc", max_iters=100)
        report = robustness_sweep(None, [0, 2000], attack_fixtures(3), model, "abc", base_config=base)

        assert [row.epsilon for row in report.rows] == [0.0, 2000.0]
        untouched = report.rows[0]
        assert untouched.mean_linf == 0.0
        assert untouched.mean_db is None
        assert report.transform == {"type": "identity"}
        data = report.to_dict()
        assert set(data["rows"][1]) >= {"sr_x_adv", "sr_g_x_adv", "auc", "mean_db"}

    def test_zero_epsilon_is_undetectable(self, model):
        fixtures = attack_fixtures(4)
        assert all(model.transcribe(x.samples) != "abc" for x in fixtures)
        base = AttackConfig(target="abc", max_iters=50)
        report = robustness_sweep(QuantizeConfig(bits=8), [0], fixtures, model, "abc", base_config=base)
        row = report.rows[0]
        assert row.mean_linf == 0.0
        assert row.sr_x_adv == 0.0
        assert row.auc == pytest.approx(0.5)

    def test_needs_epsilons_and_fixtures(self, model):
        with pytest.raises(ValueError):
            robustness_sweep(None, [], attack_fixtures(1), model, "abc")
        with pytest.raises(ValueError):
            robustness_sweep(None, [100], [], model, "abc")
