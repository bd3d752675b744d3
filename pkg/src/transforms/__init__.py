"""
Input transformation functions g: AudioBuffer -> AudioBuffer.

Every transform preserves length, sample rate and finiteness, and is a pure
function of its input and TransformConfig.
"""

import structlog

from core.audio import AudioBuffer
from .config import (
    IdentityConfig,
    LpcConfig,
    MelInvertConfig,
    QuantizeConfig,
    ResampleConfig,
    ShelfFilterConfig,
    TransformConfig,
    TransformError,
    parse_transform,
)
from .filtering import shelf_filter
from .lpc import lpc_transform
from .mel import mel_extract, mel_extract_invert, mel_invert
from .quantize import quantize_dequantize
from .resample import down_up_sample

logger = structlog.get_logger("transforms")


def apply(g: TransformConfig, x: AudioBuffer) -> AudioBuffer:
    """
    Apply the transform selected by ``g`` to ``x``.

    Args:
        g: Transform configuration
        x: Input audio

    Returns:
        Transformed audio with the input's length and sample rate

    Raises:
        TransformError: On precondition violations
    """
    if isinstance(g, QuantizeConfig):
        out = quantize_dequantize(x, g.bits)
    elif isinstance(g, ResampleConfig):
        out = down_up_sample(x, g.intermediate_rate)
    elif isinstance(g, ShelfFilterConfig):
        out = shelf_filter(x, g.low_factor, g.high_factor, g.gain_db, g.q, g.frame_length, g.hop_length)
    elif isinstance(g, MelInvertConfig):
        out = mel_extract_invert(x, g.n_mels, g.griffin_lim_iters, g.frame_length, g.hop_length)
    elif isinstance(g, LpcConfig):
        out = lpc_transform(x, g.order, g.window_ms, g.hop_ms, g.excitation_seed)
    elif isinstance(g, IdentityConfig):
        out = x
    else:
        raise TransformError(f"Unknown transform config: {g!r}")

    if len(out) != len(x) or out.sample_rate != x.sample_rate:
        raise TransformError(f"{g.type} changed length or sample rate")
    return out


__all__ = [
    "apply",
    "TransformConfig",
    "TransformError",
    "parse_transform",
    "QuantizeConfig",
    "ResampleConfig",
    "ShelfFilterConfig",
    "MelInvertConfig",
    "LpcConfig",
    "IdentityConfig",
    "quantize_dequantize",
    "down_up_sample",
    "shelf_filter",
    "mel_extract",
    "mel_invert",
    "lpc_transform",
]
