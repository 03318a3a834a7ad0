"""Per-frame segmentation backends.

A backend turns one BGR frame into labeled binary masks with confidences.
``GroundedSamBackend`` is the production stack (text-prompted detector
feeding a box-prompted segmenter); it needs model weights on disk or hub
access and raises ModelUnavailable with diagnostics otherwise.
``ColorKeyBackend`` segments by color distance and exists so the harvest
loop, the VOS propagator, and the export format can be exercised and
demonstrated without any model weights.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from typing import Protocol, Sequence

import numpy as np

from .config import PROMPTS
from .errors import ModelUnavailable


@dataclass(frozen=True)
class Detection:
    label: str
    confidence: float
    mask: np.ndarray  # bool (H, W)


class Segmenter(Protocol):
    name: str

    def segment(self, frame_bgr: np.ndarray) -> list[Detection]: ...

    def manifest(self) -> dict: ...


class GroundedSamBackend:
    """Zero-shot text-prompted detection plus box-prompted segmentation.

    Boxes come from a grounded object detector queried with the four
    label prompts; each box then prompts the segmenter for a pixel mask.
    Model identifiers are pinned here and recorded in the output manifest.
    """

    name = "grounded-sam"
    DETECTOR_ID = "IDEA-Research/grounding-dino-tiny"
    SEGMENTER_ID = "facebook/sam-vit-base"

    def __init__(
        self,
        prompts: Sequence[str] = PROMPTS,
        box_threshold: float = 0.3,
        device: str = "cpu",
    ) -> None:
        self.prompts = tuple(prompts)
        self.box_threshold = box_threshold
        self.device = device
        try:
            import torch  # noqa: F401
            from transformers import (
                AutoModelForZeroShotObjectDetection,
                AutoProcessor,
                SamModel,
                SamProcessor,
            )

            self._detector_processor = AutoProcessor.from_pretrained(self.DETECTOR_ID)
            self._detector = AutoModelForZeroShotObjectDetection.from_pretrained(
                self.DETECTOR_ID
            ).to(device)
            self._sam_processor = SamProcessor.from_pretrained(self.SEGMENTER_ID)
            self._sam = SamModel.from_pretrained(self.SEGMENTER_ID).to(device)
        except Exception as exc:  # import, download, or load failure: all fatal
            raise ModelUnavailable(
                f"cannot load {self.DETECTOR_ID} + {self.SEGMENTER_ID}: "
                f"{type(exc).__name__}: {exc}"
            ) from exc

    def segment(self, frame_bgr: np.ndarray) -> list[Detection]:
        import torch

        rgb = np.ascontiguousarray(frame_bgr[:, :, ::-1])
        # grounding text: lowercase phrases, period-terminated
        text = " ".join(f"a {p.lower()}." for p in self.prompts)
        inputs = self._detector_processor(
            images=rgb, text=text, return_tensors="pt"
        ).to(self.device)
        with torch.no_grad():
            outputs = self._detector(**inputs)
        results = self._detector_processor.post_process_grounded_object_detection(
            outputs,
            inputs.input_ids,
            threshold=self.box_threshold,
            target_sizes=[rgb.shape[:2]],
        )[0]
        detections = []
        for box, score, phrase in zip(
            results["boxes"], results["scores"], results["labels"]
        ):
            label = self._match_prompt(str(phrase))
            if label is None:
                continue
            sam_inputs = self._sam_processor(
                rgb, input_boxes=[[box.tolist()]], return_tensors="pt"
            ).to(self.device)
            with torch.no_grad():
                sam_out = self._sam(**sam_inputs)
            masks = self._sam_processor.image_processor.post_process_masks(
                sam_out.pred_masks.cpu(),
                sam_inputs["original_sizes"].cpu(),
                sam_inputs["reshaped_input_sizes"].cpu(),
            )[0][0]
            best = int(sam_out.iou_scores.squeeze().argmax())
            detections.append(
                Detection(
                    label=label,
                    confidence=float(score),
                    mask=masks[best].numpy().astype(bool),
                )
            )
        return detections

    def _match_prompt(self, phrase: str) -> str | None:
        lowered = phrase.lower()
        for prompt in self.prompts:
            if prompt.lower() in lowered:
                return prompt
        return None

    def manifest(self) -> dict:
        import torch
        import transformers

        return {
            "backend": self.name,
            "detector": self.DETECTOR_ID,
            "segmenter": self.SEGMENTER_ID,
            "box_threshold": self.box_threshold,
            "transformers_version": transformers.__version__,
            "torch_version": torch.__version__,
        }


class ColorKeyBackend:
    """Deterministic color-distance segmenter for tests and demos.

    Each label keys on a reference BGR color; a pixel belongs to the
    label whose reference is nearest, provided it is within tolerance.
    """

    name = "color-key"
    DEFAULT_COLORS = {
        "Food": (40, 40, 200),  # red-ish
        "Spoon": (128, 128, 128),
        "Fork": (220, 120, 60),  # blue-ish, kept far from the face tone
        "Face": (140, 180, 220),  # tan
    }
    DEFAULT_CONFIDENCE = {"Food": 0.88, "Spoon": 0.95, "Fork": 0.93, "Face": 0.92}

    def __init__(
        self,
        colors: dict | None = None,
        tolerance: float = 40.0,
        min_area_px: int = 16,
    ) -> None:
        self.colors = dict(colors or self.DEFAULT_COLORS)
        self.tolerance = tolerance
        self.min_area_px = min_area_px  # compression specks are not detections

    def segment(self, frame_bgr: np.ndarray) -> list[Detection]:
        frame = frame_bgr.astype(np.float32)
        detections = []
        for label, color in self.colors.items():
            dist = np.linalg.norm(frame - np.array(color, dtype=np.float32), axis=2)
            mask = dist <= self.tolerance
            if int(mask.sum()) >= self.min_area_px:
                detections.append(
                    Detection(
                        label=label,
                        confidence=self.DEFAULT_CONFIDENCE[label],
                        mask=mask,
                    )
                )
        return detections

    def manifest(self) -> dict:
        table = ";".join(f"{k}={v}" for k, v in sorted(self.colors.items()))
        return {
            "backend": self.name,
            "color_table_sha256": hashlib.sha256(table.encode()).hexdigest(),
            "tolerance": self.tolerance,
            "min_area_px": self.min_area_px,
        }


def make_segmenter(name: str, **kwargs) -> Segmenter:
    if name == "grounded":
        return GroundedSamBackend(**kwargs)
    if name == "color":
        return ColorKeyBackend(**kwargs)
    raise ValueError(f"unknown segmenter {name!r}; expected 'grounded' or 'color'")
