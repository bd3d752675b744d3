"""
Transcriber boundary: backend specs, the base transcriber class and its error type.
"""

import time
from abc import ABC, abstractmethod
from typing import Any, Dict, List, Literal, Optional, Union

import structlog
from pydantic import BaseModel, ConfigDict, Field, TypeAdapter, field_validator
from typing_extensions import Annotated

from core.audio import AudioBuffer
from core.logger import LoggerMixin
from metrics.text import Transcript


class TranscriptionError(Exception):
    """A transcription backend failed; carries whatever diagnostics the backend gave."""

    def __init__(self, message: str, backend: str, exit_code: Optional[int] = None,
                 status_code: Optional[int] = None, stderr: Optional[str] = None,
                 example_id: Optional[str] = None):
        super().__init__(message)
        self.backend = backend
        self.exit_code = exit_code
        self.status_code = status_code
        self.stderr = stderr
        self.example_id = example_id

    def with_example(self, example_id: Optional[str]) -> "TranscriptionError":
        self.example_id = example_id
        return self

    def to_dict(self) -> Dict[str, Any]:
        data = {"backend": self.backend, "message": str(self)}
        for key in ("exit_code", "status_code", "stderr", "example_id"):
            value = getattr(self, key)
            if value is not None:
                data[key] = value
        return data


class _SpecBase(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")


class SubprocessSpec(_SpecBase):
    """Run a command per clip; ``{input}`` is replaced by a temporary WAV path."""

    type: Literal["subprocess"] = "subprocess"
    command: str
    timeout_ms: int = Field(default=30000, gt=0)

    @field_validator("command")
    @classmethod
    def _has_placeholder(cls, value: str) -> str:
        if "{input}" not in value:
            raise ValueError("command template must contain an {input} placeholder")
        return value


class HttpSpec(_SpecBase):
    """POST the clip as audio/wav and read a text/plain transcript."""

    type: Literal["http"] = "http"
    url: str
    timeout_ms: int = Field(default=30000, gt=0)
    retry_max_attempts: int = Field(default=3, ge=1)
    retry_backoff_factor: float = Field(default=1.0, ge=0)


class MockEntry(_SpecBase):
    """One scripted clip: its energy ladder, transcript and optional garble severity on misses."""

    ladder: List[int]
    transcript: str
    severity: Optional[float] = Field(default=None, ge=0.0, le=1.0)


class MockSpec(_SpecBase):
    """
    Deterministic stand-in transcriber. Clips are looked up by energy fingerprint;
    unscripted clips fall back to ``fallback``.
    """

    type: Literal["mock"] = "mock"
    entries: Dict[str, MockEntry] = Field(default_factory=dict)
    frame_ms: float = Field(default=64.0, gt=0)
    step_db: float = Field(default=2.0, gt=0)
    floor_db: float = -80.0
    garble_scale_db: float = Field(default=20.0, gt=0)
    fallback: Literal["garble", "empty", "error"] = "garble"


TranscriberSpec = Annotated[Union[SubprocessSpec, HttpSpec, MockSpec], Field(discriminator="type")]

_ADAPTER = TypeAdapter(TranscriberSpec)


def parse_transcriber_spec(data: Union[Dict[str, Any], str, bytes]) -> TranscriberSpec:
    """Parse a TranscriberSpec from a dict or JSON text."""
    if isinstance(data, (str, bytes)):
        return _ADAPTER.validate_json(data)
    return _ADAPTER.validate_python(data)


class BaseTranscriber(LoggerMixin, ABC):
    """
    Base class for transcription backends.

    Subclasses implement ``_transcribe``; ``transcribe`` normalizes the result,
    logs the call and attaches the example id to failures. Instances are
    shareable across threads.
    """

    backend: str = "base"

    def __init__(self, spec: TranscriberSpec, logger: Optional[structlog.stdlib.BoundLogger] = None):
        super().__init__(f"transcription.{self.backend}", logger)
        self.spec = spec

    @abstractmethod
    def _transcribe(self, x: AudioBuffer) -> str:
        """Return the raw transcript for ``x``."""

    def describe(self) -> str:
        return self.backend

    def transcribe(self, x: AudioBuffer, example_id: Optional[str] = None) -> Transcript:
        """
        Transcribe one clip.

        Raises:
            TranscriptionError: On backend failure, tagged with ``example_id``
        """
        start = time.perf_counter()
        try:
            text = self._transcribe(x)
        except TranscriptionError as e:
            self.log_backend_call(self.backend, self.describe(), status=e.status_code or e.exit_code,
                                  response_time=time.perf_counter() - start, error=str(e))
            raise e.with_example(example_id)
        self.log_backend_call(self.backend, self.describe(), response_time=time.perf_counter() - start)
        return Transcript(text)

    def close(self):
        pass

    def __enter__(self):
        return self

    def __exit__(self, exc_type, exc_val, exc_tb):
        self.close()


def create_transcriber(spec: TranscriberSpec,
                       logger: Optional[structlog.stdlib.BoundLogger] = None) -> BaseTranscriber:
    """Build the transcriber for a spec."""
    # Imported here so each backend module can import this one.
    from .api_client import HttpTranscriber
    from .mock import MockTranscriber
    from .subprocess_client import SubprocessTranscriber

    transcriber_map = {
        "subprocess": SubprocessTranscriber,
        "http": HttpTranscriber,
        "mock": MockTranscriber,
    }
    if spec.type not in transcriber_map:
        raise ValueError(f"Unsupported transcriber backend: {spec.type}")
    return transcriber_map[spec.type](spec, logger)


def transcribe(spec: TranscriberSpec, x: AudioBuffer) -> Transcript:
    """One-shot transcription with a throwaway transcriber."""
    with create_transcriber(spec) as transcriber:
        return transcriber.transcribe(x)
