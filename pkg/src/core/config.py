"""
Configuration management for the WaveGuard tool.
"""

import os
from pathlib import Path
from typing import Optional
from dotenv import load_dotenv
from pydantic import BaseModel, Field

DEFAULT_PRESETS_PATH = str(Path(__file__).resolve().parents[2] / "config" / "presets.yaml")


class Config(BaseModel):
    """Configuration class for the WaveGuard tool."""

    # Logging Configuration
    log_level: str = Field(default="INFO", description="Logging level")
    json_console: bool = Field(default=False, description="Output single-line JSON logs to the console")
    logs_storage_path: str = Field(default="./logs", description="Path to store log files")

    # Transcriber Configuration
    asr_cmd: Optional[str] = Field(
        default=None,
        description="Default subprocess transcriber command template with an {input} placeholder"
    )
    asr_url: Optional[str] = Field(default=None, description="Default HTTP transcriber endpoint")
    asr_timeout_ms: int = Field(default=30000, description="Transcriber timeout in milliseconds")
    asr_retry_max_attempts: int = Field(
        default=3,
        description="Maximum attempts for HTTP transcription calls"
    )
    asr_retry_backoff_factor: float = Field(
        default=1.0,
        description="Exponential backoff multiplier for HTTP retries"
    )

    # Analysis Configuration
    presets_path: str = Field(default=DEFAULT_PRESETS_PATH, description="Transform/threshold presets YAML")

    # Reproducibility / Execution
    seed: int = Field(default=0, description="Seed for every random choice in a run")
    jobs: int = Field(default=1, description="Parallel workers for corpus evaluation")

    def __init__(self, **kwargs):
        # Load environment variables
        load_dotenv()

        # Override with environment variables
        env_config = {
            'log_level': os.getenv('LOG_LEVEL', 'INFO'),
            'json_console': os.getenv('JSON_CONSOLE', 'false').lower() == 'true',
            'logs_storage_path': os.getenv('LOGS_STORAGE_PATH', './logs'),
            'asr_cmd': os.getenv('WAVEGUARD_ASR_CMD'),
            'asr_url': os.getenv('WAVEGUARD_ASR_URL'),
            'asr_timeout_ms': int(os.getenv('WAVEGUARD_ASR_TIMEOUT_MS', '30000')),
            'asr_retry_max_attempts': int(os.getenv('WAVEGUARD_ASR_RETRY_MAX_ATTEMPTS', '3')),
            'asr_retry_backoff_factor': float(os.getenv('WAVEGUARD_ASR_RETRY_BACKOFF_FACTOR', '1.0')),
            'presets_path': os.getenv('WAVEGUARD_PRESETS_PATH', DEFAULT_PRESETS_PATH),
            'seed': int(os.getenv('WAVEGUARD_SEED', '0')),
            'jobs': int(os.getenv('WAVEGUARD_JOBS', '1')),
        }

        # Remove None values
        env_config = {k: v for k, v in env_config.items() if v is not None}

        # Merge with provided kwargs
        env_config.update(kwargs)

        super().__init__(**env_config)

    def validate_config(self) -> bool:
        """Validate that the configuration is consistent."""
        if self.asr_timeout_ms <= 0:
            raise ValueError("WAVEGUARD_ASR_TIMEOUT_MS must be positive")
        if self.asr_retry_max_attempts < 1:
            raise ValueError("WAVEGUARD_ASR_RETRY_MAX_ATTEMPTS must be at least 1")
        if self.asr_retry_backoff_factor < 0:
            raise ValueError("WAVEGUARD_ASR_RETRY_BACKOFF_FACTOR must not be negative")
        if self.jobs < 1:
            raise ValueError("WAVEGUARD_JOBS must be at least 1")
        return True

    @property
    def asr_timeout_seconds(self) -> float:
        """Transcriber timeout in seconds, as httpx and subprocess expect it."""
        return self.asr_timeout_ms / 1000.0
