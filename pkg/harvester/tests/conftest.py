from __future__ import annotations

import math

import cv2
import numpy as np
import pytest

from mask_harvester.backends import ColorKeyBackend

BACKGROUND = (28, 28, 28)
W, H = 320, 240
FPS = 15.0


def paint_scene(tip_x: float, bowl_top_y: float, with_food=True, with_face=True):
    """One frame of the sample scene: side-view spoon, food blob, face disk."""
    frame = np.full((H, W, 3), BACKGROUND, dtype=np.uint8)
    colors = ColorKeyBackend.DEFAULT_COLORS
    bowl_len, depth, handle_len = 90, 22, 70
    cx = int(tip_x + bowl_len / 2)
    top = int(bowl_top_y)
    # flat-topped bowl: lower half of an ellipse
    cv2.ellipse(frame, (cx, top), (bowl_len // 2, depth), 0, 0, 180, colors["Spoon"], -1)
    neck = int(tip_x + bowl_len)
    rise = int(handle_len * math.tan(math.radians(30)))
    cv2.line(frame, (neck, top + 3), (neck + handle_len, top + 3 - rise), colors["Spoon"], 7)
    if with_food:
        # rests on the rim line without occluding the bowl's top edge
        cv2.circle(frame, (cx, top - 19), 16, colors["Food"], -1)
    if with_face:
        cv2.circle(frame, (160, 40), 20, colors["Face"], -1)
    return frame


def scene_frames(count=150, lifted_range=(30, 120)):
    frames = []
    for i in range(count):
        t = i / (count - 1)
        tip_x = 30.0 + 20.0 * t
        lifted = lifted_range[0] <= i <= lifted_range[1]
        frames.append(paint_scene(tip_x, 110.0 if lifted else 200.0))
    return frames


@pytest.fixture(scope="session")
def sample_clip(tmp_path_factory):
    """A 10-second sample clip (150 frames at 15 fps) on disk."""
    path = tmp_path_factory.mktemp("video") / "sample.avi"
    writer = cv2.VideoWriter(str(path), cv2.VideoWriter_fourcc(*"MJPG"), FPS, (W, H))
    for frame in scene_frames():
        writer.write(frame)
    writer.release()
    return path
