"""
Named transform and threshold presets loaded from YAML.
"""

from pathlib import Path
from typing import Dict, Optional, Union

import structlog
import yaml
from pydantic import BaseModel, Field

from transforms.config import TransformConfig

from .config import DEFAULT_PRESETS_PATH

logger = structlog.get_logger("presets")


class PresetError(KeyError):
    """Unknown preset name."""

    def __init__(self, kind: str, name: str, known):
        super().__init__(f"Unknown {kind} preset '{name}'. Known: {', '.join(sorted(known))}")
        self.kind = kind
        self.name = name

    def __str__(self) -> str:
        return self.args[0]


class Presets(BaseModel):
    """Transform presets by name and detection thresholds by transcriber then preset."""

    transforms: Dict[str, TransformConfig] = Field(default_factory=dict)
    thresholds: Dict[str, Dict[str, float]] = Field(default_factory=dict)

    def transform(self, name: str) -> TransformConfig:
        if name not in self.transforms:
            raise PresetError("transform", name, self.transforms)
        return self.transforms[name]

    def threshold(self, asr: str, name: str) -> float:
        """Threshold for a transform preset under a transcriber preset (e.g. 'deepspeech')."""
        if asr not in self.thresholds:
            raise PresetError("threshold", asr, self.thresholds)
        by_transform = self.thresholds[asr]
        if name not in by_transform:
            raise PresetError(f"{asr} threshold", name, by_transform)
        return by_transform[name]

    def name_of(self, g: TransformConfig) -> Optional[str]:
        """Preset name whose configuration equals ``g``, if any."""
        for name, preset in self.transforms.items():
            if preset == g:
                return name
        return None


def load_presets(path: Union[str, Path, None] = None) -> Presets:
    """
    Load presets from YAML (defaults to the bundled ``config/presets.yaml``).

    Raises:
        FileNotFoundError: If the file does not exist
        pydantic.ValidationError: If a preset is malformed
    """
    path = Path(path or DEFAULT_PRESETS_PATH)
    with open(path, "r") as f:
        data = yaml.safe_load(f) or {}
    presets = Presets.model_validate(data)
    logger.debug("Presets loaded", path=str(path), transforms=len(presets.transforms),
                 threshold_sets=len(presets.thresholds))
    return presets
