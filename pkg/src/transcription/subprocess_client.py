"""
Subprocess transcription backend.

The command template is split with shell rules; ``{input}`` is replaced by the
path of a temporary 16-bit PCM WAV file. The trimmed stdout is the transcript.
"""

import os
import shlex
import subprocess
import tempfile
from typing import List, Optional

import structlog

from core.audio import AudioBuffer, save_wav
from .base import BaseTranscriber, SubprocessSpec, TranscriptionError


class SubprocessTranscriber(BaseTranscriber):
    """Runs an external ASR command once per clip."""

    backend = "subprocess"

    def __init__(self, spec: SubprocessSpec, logger: Optional[structlog.stdlib.BoundLogger] = None):
        super().__init__(spec, logger)
        self.template = shlex.split(spec.command)

    def describe(self) -> str:
        return self.template[0] if self.template else self.spec.command

    def _build_command(self, input_path: str) -> List[str]:
        return [part.replace("{input}", input_path) for part in self.template]

    def _execute(self, command: List[str]) -> str:
        """
        Execute the command with a timeout.

        Raises:
            TranscriptionError: If the command fails, times out or cannot start
        """
        try:
            result = subprocess.run(
                command,
                capture_output=True,
                timeout=self.spec.timeout_ms / 1000.0,
                check=False,
            )
        except subprocess.TimeoutExpired as e:
            raise TranscriptionError(
                f"ASR command timed out after {self.spec.timeout_ms} ms",
                backend=self.backend,
                stderr=(e.stderr or b"").decode("utf-8", errors="replace") or None,
            ) from e
        except OSError as e:
            raise TranscriptionError(f"ASR command could not start: {e}", backend=self.backend) from e

        if result.returncode != 0:
            stderr = result.stderr.decode("utf-8", errors="replace").strip()
            raise TranscriptionError(
                f"ASR command exited with code {result.returncode}: {stderr[:200]}",
                backend=self.backend,
                exit_code=result.returncode,
                stderr=stderr,
            )
        return result.stdout.decode("utf-8", errors="replace").strip()

    def _transcribe(self, x: AudioBuffer) -> str:
        fd, path = tempfile.mkstemp(prefix="waveguard-", suffix=".wav")
        os.close(fd)
        try:
            save_wav(x, path)
            return self._execute(self._build_command(path))
        finally:
            if os.path.exists(path):
                os.remove(path)
