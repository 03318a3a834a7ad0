"""Per-frame measurement gating: is a food-bearing utensil lifted near the face?"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import Enum
from typing import Optional

from .calibration import UtensilKind
from .masks import FrameObservation, InstanceMask, Label, PixelPoint, area_px, centroid


class DecisionReason(Enum):
    NO_UTENSIL = "NoUtensil"
    NO_FOOD = "NoFood"
    NO_FACE = "NoFace"
    TOO_FAR_FROM_FACE = "TooFarFromFace"
    ACTIVE = "Active"


@dataclass(frozen=True)
class MeasurementCandidate:
    """A (food, utensil) pairing considered for measurement."""

    food: InstanceMask
    utensil: InstanceMask
    utensil_kind: UtensilKind
    food_to_utensil_px: float
    utensil_to_face_px: Optional[float] = None


@dataclass(frozen=True)
class KeyframeDecision:
    active: bool
    reason: DecisionReason
    candidate: Optional[MeasurementCandidate] = None

    def __post_init__(self) -> None:
        if self.active != (self.reason is DecisionReason.ACTIVE) or self.active != (
            self.candidate is not None
        ):
            raise ValueError("active, reason and candidate presence must agree")


def _distance(a: PixelPoint, b: PixelPoint) -> float:
    return math.hypot(a.x - b.x, a.y - b.y)


def _best_instance(frame: FrameObservation, label: Label) -> Optional[InstanceMask]:
    """Highest-confidence instance of a label; ties go to the larger mask,
    then to the earlier instance in frame order. Empty masks are treated
    as absent detections."""
    best = None
    best_key = None
    for order, inst in enumerate(frame.instances):
        if inst.label is not label:
            continue
        area = area_px(inst)
        if area == 0:
            continue
        key = (-inst.confidence, -area, order)
        if best_key is None or key < best_key:
            best, best_key = inst, key
    return best


def select_utensils(
    frame: FrameObservation,
) -> tuple[Optional[InstanceMask], Optional[InstanceMask]]:
    """The most confident spoon and fork instances, either possibly absent."""
    return _best_instance(frame, Label.SPOON), _best_instance(frame, Label.FORK)


def pair_food(
    frame: FrameObservation,
    spoon: Optional[InstanceMask],
    fork: Optional[InstanceMask],
) -> list[MeasurementCandidate]:
    """Pair each present utensil with the food instance nearest its centroid."""
    foods = [
        inst
        for inst in frame.instances
        if inst.label is Label.FOOD and area_px(inst) > 0
    ]
    if not foods:
        return []
    candidates = []
    for utensil, kind in ((spoon, UtensilKind.SPOON), (fork, UtensilKind.FORK)):
        if utensil is None:
            continue
        uc = centroid(utensil)
        food = min(foods, key=lambda f: _distance(centroid(f), uc))
        candidates.append(
            MeasurementCandidate(
                food=food,
                utensil=utensil,
                utensil_kind=kind,
                food_to_utensil_px=_distance(centroid(food), uc),
            )
        )
    return candidates


def decide(
    frame: FrameObservation,
    threshold_fraction: float = 0.5,
    spoon_first: bool = True,
) -> KeyframeDecision:
    """Gate a frame for measurement.

    Among the available (food, utensil) pairs, the one whose utensil
    centroid is nearest the face centroid wins; the frame is active when
    that distance is under ``threshold_fraction`` of the image height.
    """
    spoon, fork = select_utensils(frame)
    if spoon is None and fork is None:
        return KeyframeDecision(False, DecisionReason.NO_UTENSIL)
    candidates = pair_food(frame, spoon, fork)
    if not candidates:
        return KeyframeDecision(False, DecisionReason.NO_FOOD)
    face = _best_instance(frame, Label.FACE)
    if face is None:
        return KeyframeDecision(False, DecisionReason.NO_FACE)
    face_c = centroid(face)
    candidates = [
        replace(c, utensil_to_face_px=_distance(centroid(c.utensil), face_c))
        for c in candidates
    ]
    preferred = UtensilKind.SPOON if spoon_first else UtensilKind.FORK
    best = min(
        candidates,
        key=lambda c: (c.utensil_to_face_px, 0 if c.utensil_kind is preferred else 1),
    )
    if best.utensil_to_face_px < threshold_fraction * frame.image_height:
        return KeyframeDecision(True, DecisionReason.ACTIVE, best)
    return KeyframeDecision(False, DecisionReason.TOO_FAR_FROM_FACE)
