"""
HTTP transcription backend with retry logic.

Protocol: ``POST <url>`` with the clip as a 16-bit PCM WAV body
(``Content-Type: audio/wav``); a 200 response carries the transcript as
``text/plain``.
"""

import time
from typing import Optional

import httpx
import structlog
from tenacity import (
    RetryError,
    Retrying,
    retry_if_exception_type,
    stop_after_attempt,
    wait_exponential,
)

from core.audio import AudioBuffer, to_wav_bytes
from .base import BaseTranscriber, HttpSpec, TranscriptionError


class HttpTranscriber(BaseTranscriber):
    """HTTP client for an ASR service with exponential-backoff retries."""

    backend = "http"

    def __init__(self, spec: HttpSpec, logger: Optional[structlog.stdlib.BoundLogger] = None,
                 transport: Optional[httpx.BaseTransport] = None):
        """
        Initialize the HTTP transcriber.

        Args:
            spec: Endpoint, timeout and retry settings
            logger: Optional logger instance
            transport: Optional httpx transport (tests pass ``httpx.MockTransport``)
        """
        super().__init__(spec, logger)
        self.client = httpx.Client(timeout=spec.timeout_ms / 1000.0, transport=transport)

    def describe(self) -> str:
        return self.spec.url

    def _retrying(self) -> Retrying:
        return Retrying(
            stop=stop_after_attempt(self.spec.retry_max_attempts),
            wait=wait_exponential(multiplier=self.spec.retry_backoff_factor, max=10),
            retry=retry_if_exception_type((httpx.HTTPStatusError, httpx.RequestError)),
            reraise=False,
        )

    def _post(self, body: bytes) -> httpx.Response:
        start_time = time.time()
        response = self.client.post(self.spec.url, content=body, headers={"Content-Type": "audio/wav"})
        self.logger.debug(
            "ASR request completed",
            url=self.spec.url,
            status_code=response.status_code,
            response_time_ms=round((time.time() - start_time) * 1000, 2),
        )
        response.raise_for_status()
        return response

    def _transcribe(self, x: AudioBuffer) -> str:
        body = to_wav_bytes(x)
        try:
            response = self._retrying()(self._post, body)
        except RetryError as e:
            cause = e.last_attempt.exception()
            if isinstance(cause, httpx.HTTPStatusError):
                raise TranscriptionError(
                    f"ASR request failed after {self.spec.retry_max_attempts} attempts: {cause}",
                    backend=self.backend,
                    status_code=cause.response.status_code,
                    stderr=cause.response.text[:500],
                ) from cause
            raise TranscriptionError(
                f"ASR request error after {self.spec.retry_max_attempts} attempts: {cause}",
                backend=self.backend,
            ) from cause
        return response.text.strip()

    def close(self):
        self.client.close()
