"""
TransformConfig: tagged union selecting one input transformation and its hyper-parameters.

JSON form is ``{"type": "<tag>", ...params}`` with tags ``quantize``, ``resample``,
``shelf_filter``, ``mel_invert``, ``lpc`` and ``identity``.
"""

from typing import Any, Dict, Literal, Union

from pydantic import BaseModel, ConfigDict, Field, TypeAdapter
from typing_extensions import Annotated


class TransformError(ValueError):
    """A transform precondition was violated."""


class _TransformBase(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    def to_json_dict(self) -> Dict[str, Any]:
        return self.model_dump(mode="json")

    @property
    def label(self) -> str:
        """Short human-readable name used in report tables."""
        return self.type


class QuantizeConfig(_TransformBase):
    type: Literal["quantize"] = "quantize"
    bits: int = Field(default=6, ge=1, le=16)

    @property
    def label(self) -> str:
        return f"Quantization-Dequantization ({self.bits} bits)"


class ResampleConfig(_TransformBase):
    type: Literal["resample"] = "resample"
    intermediate_rate: int = Field(default=6000, gt=0)

    @property
    def label(self) -> str:
        return f"Downsampling-Upsampling ({self.intermediate_rate} Hz)"


class ShelfFilterConfig(_TransformBase):
    type: Literal["shelf_filter"] = "shelf_filter"
    low_factor: float = Field(default=0.1, gt=0)
    high_factor: float = Field(default=1.5, gt=0)
    gain_db: float = -30.0
    q: float = Field(default=0.707, gt=0)
    frame_length: int = 512
    hop_length: int = 128

    @property
    def label(self) -> str:
        return "Filtering"


class MelInvertConfig(_TransformBase):
    type: Literal["mel_invert"] = "mel_invert"
    n_mels: int = Field(default=80, gt=0)
    griffin_lim_iters: int = Field(default=32, gt=0)
    frame_length: int = 512
    hop_length: int = 128

    @property
    def label(self) -> str:
        return f"Mel Extraction-Inversion ({self.n_mels} bins)"


class LpcConfig(_TransformBase):
    type: Literal["lpc"] = "lpc"
    order: int = Field(default=20, gt=0)
    window_ms: float = Field(default=25.0, gt=0)
    hop_ms: float = Field(default=12.5, gt=0)
    excitation_seed: int = Field(default=0, ge=0)

    @property
    def label(self) -> str:
        return f"LPC (order {self.order})"


class IdentityConfig(_TransformBase):
    type: Literal["identity"] = "identity"

    @property
    def label(self) -> str:
        return "None"


TransformConfig = Annotated[
    Union[QuantizeConfig, ResampleConfig, ShelfFilterConfig, MelInvertConfig, LpcConfig, IdentityConfig],
    Field(discriminator="type"),
]

_ADAPTER = TypeAdapter(TransformConfig)


def parse_transform(data: Union[Dict[str, Any], str, bytes]) -> TransformConfig:
    """
    Parse a TransformConfig from a dict or a JSON string.

    Raises:
        pydantic.ValidationError: On unknown tags or invalid parameters
    """
    if isinstance(data, (str, bytes)):
        return _ADAPTER.validate_json(data)
    return _ADAPTER.validate_python(data)
