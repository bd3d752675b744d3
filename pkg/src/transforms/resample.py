"""Down-sampling followed by up-sampling back to the original rate."""

import numpy as np
from scipy.interpolate import interp1d

from core.audio import AudioBuffer
from .config import TransformError


def down_up_sample(x: AudioBuffer, intermediate_rate: int) -> AudioBuffer:
    """
    Linear-interpolation decimation to ``intermediate_rate`` and linear
    reconstruction at the original rate. No anti-alias prefilter is applied.

    The reconstruction extrapolates linearly past the last intermediate
    sample, so affine signals come back exactly.
    """
    if not 0 < intermediate_rate < x.sample_rate:
        raise TransformError(
            f"intermediate_rate must be in (0, {x.sample_rate}), got {intermediate_rate}"
        )
    n = len(x)
    if n < 2:
        return x.with_samples(x.samples.copy())

    t = np.arange(n) / x.sample_rate
    m = int(np.floor((n - 1) * intermediate_rate / x.sample_rate)) + 1
    t_down = np.arange(m) / intermediate_rate
    down = np.interp(t_down, t, x.samples)
    if m < 2:
        return x.with_samples(np.full(n, down[0]))

    up = interp1d(t_down, down, kind="linear", fill_value="extrapolate", assume_sorted=True)(t)
    return x.with_samples(up)
