"""Tests for configuration, presets and logging setup."""

import pytest

from core.config import Config
from core.logger import setup_logger
from core.presets import PresetError, load_presets
from transforms import MelInvertConfig, QuantizeConfig

ENV_VARS = [
    "LOG_LEVEL",
    "WAVEGUARD_ASR_CMD",
    "WAVEGUARD_ASR_URL",
    "WAVEGUARD_ASR_TIMEOUT_MS",
    "WAVEGUARD_SEED",
    "WAVEGUARD_JOBS",
    "WAVEGUARD_PRESETS_PATH",
]


@pytest.fixture
def clean_env(monkeypatch, tmp_path):
    monkeypatch.chdir(tmp_path)
    for name in ENV_VARS:
        monkeypatch.delenv(name, raising=False)
    return monkeypatch


class TestConfig:
    def test_defaults(self, clean_env):
        config = Config()
        assert config.log_level == "INFO"
        assert config.asr_cmd is None
        assert config.seed == 0
        assert config.asr_timeout_seconds == 30.0
        assert config.validate_config()

    def test_environment_overrides(self, clean_env):
        clean_env.setenv("WAVEGUARD_ASR_CMD", "asr {input}")
        clean_env.setenv("WAVEGUARD_SEED", "7")
        clean_env.setenv("WAVEGUARD_JOBS", "4")
        config = Config()
        assert config.asr_cmd == "asr {input}"
        assert config.seed == 7
        assert config.jobs == 4

    def test_kwargs_override_environment(self, clean_env):
        clean_env.setenv("WAVEGUARD_SEED", "7")
        assert Config(seed=3).seed == 3

    @pytest.mark.parametrize("kwargs", [
        {"asr_retry_backoff_factor": -1.0},
        {"asr_timeout_ms": 0},
        {"asr_retry_max_attempts": 0},
        {"jobs": 0},
    ])
    def test_validation_errors(self, clean_env, kwargs):
        with pytest.raises(ValueError):
            Config(**kwargs).validate_config()


class TestPresets:
    def test_bundled_transforms(self):
        presets = load_presets()
        assert presets.transform("mel80") == MelInvertConfig(n_mels=80, griffin_lim_iters=32)
        assert presets.transform("quant6") == QuantizeConfig(bits=6)
        assert set(presets.transforms) == {"downsample6k", "quant6", "filter", "mel80", "lpc20"}

    def test_bundled_thresholds(self):
        presets = load_presets()
        assert presets.threshold("deepspeech", "mel80") == 0.33
        assert presets.threshold("lingvo", "quant6") == 0.26

    def test_unknown_names(self):
        presets = load_presets()
        with pytest.raises(PresetError) as info:
            presets.transform("reverb")
        assert isinstance(info.value, KeyError)
        assert "quant6" in str(info.value)
        with pytest.raises(PresetError):
            presets.threshold("whisper", "quant6")
        with pytest.raises(PresetError):
            presets.threshold("deepspeech", "reverb")

    def test_name_of(self):
        presets = load_presets()
        assert presets.name_of(QuantizeConfig(bits=6)) == "quant6"
        assert presets.name_of(QuantizeConfig(bits=5)) is None

    def test_custom_file(self, tmp_path):
        path = tmp_path / "presets.yaml"
        path.write_text("transforms:\n  q4:\n    type: quantize\n    bits: 4\n")
        presets = load_presets(path)
        assert presets.transform("q4") == QuantizeConfig(bits=4)
        assert presets.thresholds == {}


class TestLogger:
    def test_creates_log_directory(self, tmp_path):
        logger = setup_logger("evaluate", "cli", logs_dir=str(tmp_path / "logs"))
        logger.info("hello")
        files = list((tmp_path / "logs" / "cli").glob("waveguard-evaluate-*.log"))
        assert len(files) == 1
