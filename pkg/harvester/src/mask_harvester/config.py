"""Harvest run configuration."""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

PROMPTS = ("Food", "Face", "Spoon", "Fork")
BACKENDS = ("frames", "vos")
RECOMMENDED_MAX_STRIDE = 5  # larger gaps degrade mask propagation


@dataclass(frozen=True)
class HarvestConfig:
    video: Path
    backend: str = "frames"
    stride: int = 5
    confidence_floor: float = 0.0
    prompts: tuple[str, ...] = PROMPTS

    def __post_init__(self) -> None:
        object.__setattr__(self, "video", Path(self.video))
        if self.backend not in BACKENDS:
            raise ValueError(f"backend must be one of {BACKENDS}, got {self.backend!r}")
        if self.stride < 1:
            raise ValueError(f"stride must be >= 1, got {self.stride}")
        if not 0.0 <= self.confidence_floor <= 1.0:
            raise ValueError(f"confidence floor {self.confidence_floor} outside [0, 1]")
        if tuple(self.prompts) != PROMPTS:
            raise ValueError(f"prompts must be exactly {PROMPTS}, got {self.prompts!r}")
