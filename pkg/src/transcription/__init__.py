"""Pluggable transcriber backends C(x)."""

from .api_client import HttpTranscriber
from .base import (
    BaseTranscriber,
    HttpSpec,
    MockEntry,
    MockSpec,
    SubprocessSpec,
    TranscriberSpec,
    TranscriptionError,
    create_transcriber,
    parse_transcriber_spec,
    transcribe,
)
from .mock import MockTranscriber, energy_ladder, fingerprint, mock_garble, script_entry
from .subprocess_client import SubprocessTranscriber

__all__ = [
    "BaseTranscriber",
    "HttpTranscriber",
    "SubprocessTranscriber",
    "MockTranscriber",
    "TranscriberSpec",
    "SubprocessSpec",
    "HttpSpec",
    "MockSpec",
    "MockEntry",
    "TranscriptionError",
    "create_transcriber",
    "parse_transcriber_spec",
    "transcribe",
    "energy_ladder",
    "fingerprint",
    "mock_garble",
    "script_entry",
]
