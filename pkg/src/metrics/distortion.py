"""
Waveform distortion metrics in the 16-bit integer domain.
"""

import numpy as np

from core.audio import PCM_SCALE, AudioBuffer


class MetricError(ValueError):
    """A metric was asked for on inputs where it is undefined."""


class SilentSignalError(MetricError):
    """Loudness of an all-zero signal is undefined."""


def _as_samples(v) -> np.ndarray:
    if isinstance(v, AudioBuffer):
        return v.samples
    return np.asarray(v, dtype=np.float64)


def linf(x, y) -> float:
    """
    Max absolute sample difference, in integer units (x 32768).

    Raises:
        MetricError: If the lengths differ
    """
    a, b = _as_samples(x), _as_samples(y)
    if a.shape != b.shape:
        raise MetricError(f"length mismatch: {a.shape[0]} vs {b.shape[0]}")
    if a.size == 0:
        return 0.0
    return float(np.max(np.abs(a - b)) * PCM_SCALE)


def l2(x, y) -> float:
    """Euclidean distance between two waveforms, in integer units."""
    a, b = _as_samples(x), _as_samples(y)
    if a.shape != b.shape:
        raise MetricError(f"length mismatch: {a.shape[0]} vs {b.shape[0]}")
    return float(np.linalg.norm(a - b) * PCM_SCALE)


def db(v) -> float:
    """Peak loudness ``max_i 20 log10 |v_i|`` over integer-domain magnitudes."""
    peak = float(np.max(np.abs(_as_samples(v)), initial=0.0)) * PCM_SCALE
    if peak <= 0.0:
        raise SilentSignalError("dB of a silent signal is undefined")
    return float(20.0 * np.log10(peak))


def db_relative(x, delta) -> float:
    """
    Loudness of a perturbation relative to its carrier, ``dB(delta) - dB(x)``.

    Raises:
        SilentSignalError: If either signal is all zeros
    """
    return db(delta) - db(x)
